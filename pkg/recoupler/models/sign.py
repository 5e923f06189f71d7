"""
Sign matrices, their purposes and coupling topologies.

Spin indices are 1-based everywhere in this module, matching the way
spins are numbered in system documents and on the command line.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import FrozenSet, Iterable, Optional, Tuple

import numpy as np

Pair = Tuple[int, int]


def ordered_pair(i: int, j: int) -> Pair:
    return (i, j) if i < j else (j, i)


class PurposeKind(str, Enum):
    DECOUPLE = "decouple"
    DECOUPLE_ZEEMAN_FREE = "decouple-zeeman-free"
    RECOUPLE = "recouple"
    KNN_DECOUPLE = "knn-decouple"
    KNN_RECOUPLE = "knn-recouple"


_TOKEN = re.compile(r"^(?P<kind>[a-z-]+)(?::(?P<args>.*))?$")


@dataclass(frozen=True)
class Purpose:
    """What a sign matrix is meant to do.

    ``pairs`` lists the recoupled pairs (one for ordinary recoupling,
    several disjoint ones for parallel recoupling); ``k`` is the
    neighbour range of the knn variants.
    """

    kind: PurposeKind
    pairs: Tuple[Pair, ...] = ()
    k: Optional[int] = None

    @classmethod
    def decouple(cls) -> "Purpose":
        return cls(PurposeKind.DECOUPLE)

    @classmethod
    def decouple_zeeman_free(cls) -> "Purpose":
        return cls(PurposeKind.DECOUPLE_ZEEMAN_FREE)

    @classmethod
    def recouple(cls, *pairs: Pair) -> "Purpose":
        return cls(PurposeKind.RECOUPLE, tuple(ordered_pair(*p) for p in pairs))

    @classmethod
    def knn_decouple(cls, k: int) -> "Purpose":
        return cls(PurposeKind.KNN_DECOUPLE, (), k)

    @classmethod
    def knn_recouple(cls, k: int, i: int, j: int) -> "Purpose":
        return cls(PurposeKind.KNN_RECOUPLE, (ordered_pair(i, j),), k)

    @property
    def requires_zeeman_free(self) -> bool:
        return self.kind in (PurposeKind.DECOUPLE_ZEEMAN_FREE, PurposeKind.RECOUPLE)

    @property
    def recoupled(self) -> FrozenSet[Pair]:
        return frozenset(self.pairs)

    def to_token(self) -> str:
        """Compact text form, e.g. ``recouple:2,3`` or ``knn-recouple:k=1;3,4``."""
        parts = []
        if self.k is not None:
            parts.append(f"k={self.k}")
        parts.extend(f"{i},{j}" for i, j in self.pairs)
        return self.kind.value + (":" + ";".join(parts) if parts else "")

    @classmethod
    def from_token(cls, token: str) -> "Purpose":
        match = _TOKEN.match(token.strip())
        if not match:
            raise ValueError(f"Unrecognised purpose '{token}'")
        kind = PurposeKind(match.group("kind"))
        k: Optional[int] = None
        pairs = []
        for part in filter(None, (match.group("args") or "").split(";")):
            if part.startswith("k="):
                k = int(part[2:])
            else:
                i, j = (int(x) for x in part.split(","))
                pairs.append(ordered_pair(i, j))
        return cls(kind, tuple(pairs), k)

    def __str__(self) -> str:
        return self.to_token()


@dataclass(frozen=True)
class Topology:
    """Explicit set of coupled spin pairs over spins 1..n."""

    n: int
    pairs: FrozenSet[Pair]
    label: str = "custom"

    @classmethod
    def all_pairs(cls, n: int) -> "Topology":
        return cls(n, frozenset(combinations(range(1, n + 1), 2)), "all-pairs")

    @classmethod
    def chain(cls, n: int, k: int, exact: bool = False) -> "Topology":
        """Linear chain with couplings for |i-j| <= k (or == k when ``exact``)."""
        pairs = frozenset(
            (i, j)
            for i, j in combinations(range(1, n + 1), 2)
            if (j - i == k if exact else j - i <= k)
        )
        return cls(n, pairs, f"chain-{k}" + ("-exact" if exact else ""))

    @classmethod
    def ring(cls, n: int, k: int) -> "Topology":
        """Periodic chain: distance measured around the ring."""
        pairs = frozenset(
            (i, j)
            for i, j in combinations(range(1, n + 1), 2)
            if min(j - i, n - (j - i)) <= k
        )
        return cls(n, pairs, f"ring-{k}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Pair], label: str = "custom") -> "Topology":
        return cls(n, frozenset(ordered_pair(i, j) for i, j in pairs), label)

    def __contains__(self, pair: object) -> bool:
        if not isinstance(pair, tuple) or len(pair) != 2:
            return False
        return ordered_pair(*pair) in self.pairs

    def sorted_pairs(self) -> Tuple[Pair, ...]:
        return tuple(sorted(self.pairs))


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """n x m matrix over {+1, -1}; entry (i, a) is the sign of spin i's sigma_z in interval a.

    ``source_order`` and ``source_rows`` record which rows of which
    normalized Hadamard matrix the builder used (0-based row numbers).
    """

    entries: np.ndarray
    purpose: Purpose
    source_order: Optional[int] = None
    source_rows: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        signs = np.array(self.entries, dtype=np.int8, copy=True)
        if signs.ndim != 2:
            raise ValueError(f"Sign matrix must be two-dimensional, got shape {signs.shape}")
        if not np.isin(signs, (-1, 1)).all():
            raise ValueError("Sign matrix entries must be +1 or -1")
        signs.setflags(write=False)
        object.__setattr__(self, "entries", signs)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def m(self) -> int:
        return int(self.entries.shape[1])

    def row(self, spin: int) -> np.ndarray:
        return self.entries[spin - 1]

    def agreement(self, i: int, j: int) -> int:
        """Number of intervals in which spins i and j carry the same sign."""
        return int(np.count_nonzero(self.row(i) == self.row(j)))

    def with_column_order(self, order: Iterable[int]) -> "SignMatrix":
        return SignMatrix(self.entries[:, list(order)], self.purpose, self.source_order, self.source_rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return self.purpose == other.purpose and np.array_equal(self.entries, other.entries)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SignMatrix(n={self.n}, m={self.m}, purpose={self.purpose})"
