"""
Hadamard matrix value type, its construction provenance and transform operations.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple, Union

import numpy as np


@dataclass(frozen=True)
class Provenance:
    """Construction tree of a Hadamard matrix.

    ``kind`` is one of ``base``, ``sylvester``, ``paley1``, ``paley2``,
    ``registry-file`` or ``transformed``. Leaves carry their parameters
    (the order for ``base``, q for Paley, the path for files); inner nodes
    carry their operands in ``children``.
    """

    kind: str
    params: Tuple[Union[int, str], ...] = ()
    children: Tuple["Provenance", ...] = ()

    def describe(self) -> str:
        args = [str(p) for p in self.params] + [child.describe() for child in self.children]
        return f"{self.kind}({', '.join(args)})"

    @classmethod
    def base(cls, order: int) -> "Provenance":
        return cls("base", (order,))

    @classmethod
    def sylvester(cls, a: "Provenance", b: "Provenance") -> "Provenance":
        return cls("sylvester", (), (a, b))

    @classmethod
    def paley1(cls, q: int) -> "Provenance":
        return cls("paley1", (q,))

    @classmethod
    def paley2(cls, q: int) -> "Provenance":
        return cls("paley2", (q,))

    @classmethod
    def registry_file(cls, path: str) -> "Provenance":
        return cls("registry-file", (path,))

    @classmethod
    def transformed(cls, parent: "Provenance", op_count: int) -> "Provenance":
        return cls("transformed", (op_count,), (parent,))


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    """Square +/-1 matrix stored as packed sign bits, one packed row per matrix row.

    A set bit means -1. Orthogonality checks work on the packed rows in
    exact integer arithmetic.
    """

    order: int
    bits: np.ndarray
    provenance: Provenance

    @classmethod
    def from_signs(cls, entries: np.ndarray, provenance: Provenance) -> "HadamardMatrix":
        signs = np.asarray(entries)
        packed = np.packbits(signs < 0, axis=1)
        packed.setflags(write=False)
        return cls(order=signs.shape[0], bits=packed, provenance=provenance)

    @cached_property
    def entries(self) -> np.ndarray:
        """Dense int8 view with entries in {+1, -1}."""
        negative = np.unpackbits(self.bits, axis=1, count=self.order).astype(np.int8)
        signs = (1 - 2 * negative).astype(np.int8)
        signs.setflags(write=False)
        return signs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HadamardMatrix):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.bits, other.bits)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"HadamardMatrix(order={self.order}, provenance={self.provenance.describe()})"


# Equivalence operations (0-based indices)

@dataclass(frozen=True)
class PermuteRows:
    permutation: Tuple[int, ...]


@dataclass(frozen=True)
class PermuteCols:
    permutation: Tuple[int, ...]


@dataclass(frozen=True)
class NegateRow:
    index: int


@dataclass(frozen=True)
class NegateCol:
    index: int


TransformOp = Union[PermuteRows, PermuteCols, NegateRow, NegateCol]
