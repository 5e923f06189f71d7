"""
Shared matrices and builders for the test suite.
"""

import math
from itertools import combinations

import numpy as np

from recoupler.models import SpinSystem

# Four-spin decoupling matrix, already normalized
EQ15_ROWS = ["++++", "++--", "+--+", "+-+-"]

# A 12x12 Hadamard matrix that becomes normalized after negating row 7 and column 7
EQ16_ROWS = [
    "++++++-+++++",
    "+++--++-+--+",
    "++++--++-+--",
    "+-+++-+-+-+-",
    "+--++++--+-+",
    "++--++++--+-",
    "-+++++------",
    "+-+--+---++-",
    "++-+------++",
    "+-+-+--+---+",
    "+--+-+-++---",
    "++--+---++--",
]


def signs_from_rows(rows):
    return np.array([[1 if ch == "+" else -1 for ch in row] for row in rows], dtype=np.int8)


def random_system(n, rng, zeeman_hz=200.0, coupling_hz=50.0, pairs=None):
    """All-pairs (or ``pairs``) system with random frequencies in rad/s."""
    pairs = list(combinations(range(1, n + 1), 2)) if pairs is None else pairs
    zeeman = tuple(rng.uniform(-1, 1, n) * 2 * math.pi * zeeman_hz)
    couplings = {}
    for pair in pairs:
        g = 0.0
        while abs(g) < 1.0:
            g = float(rng.uniform(-1, 1) * 2 * math.pi * coupling_hz)
        couplings[pair] = g
    return SpinSystem(n=n, zeeman=zeeman, couplings=couplings)
