"""
Immutable domain values shared by the services.
"""

from .hadamard import HadamardMatrix, NegateCol, NegateRow, PermuteCols, PermuteRows, Provenance, TransformOp
from .sign import Pair, Purpose, PurposeKind, SignMatrix, Topology, ordered_pair
from .program import CouplingGate, Gate, GateSequence, PulseProgram, Rotation, SpinSystem

__all__ = [
    "HadamardMatrix",
    "Provenance",
    "TransformOp",
    "PermuteRows",
    "PermuteCols",
    "NegateRow",
    "NegateCol",
    "Pair",
    "Purpose",
    "PurposeKind",
    "SignMatrix",
    "Topology",
    "ordered_pair",
    "SpinSystem",
    "PulseProgram",
    "Rotation",
    "CouplingGate",
    "Gate",
    "GateSequence",
]
