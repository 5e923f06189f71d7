"""
Hadamard matrix construction, equivalence transforms and the registry of constructible orders.

All orthogonality checks run on packed sign bits with integer popcounts;
no floating point enters the combinatorial core.
"""

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import isprime
from sympy.functions.combinatorial.numbers import legendre_symbol

from recoupler.core.config import get_settings
from recoupler.core.exceptions import (
    IndexOutOfRangeError,
    InvalidParameterError,
    NonSignEntriesError,
    NonSquareError,
    NotHadamardError,
    NotPrimeError,
    OrderNotConstructibleError,
    RegistryExhaustedError,
    WrongResidueClassError,
)
from recoupler.models.hadamard import (
    HadamardMatrix,
    NegateCol,
    NegateRow,
    PermuteCols,
    PermuteRows,
    Provenance,
    TransformOp,
)
from recoupler.services.primes import get_sieve
from recoupler.utils.documents import read_matrix_file
from recoupler.utils.logger import hadamard_logger as logger

MatrixLike = Union[HadamardMatrix, np.ndarray, Sequence[Sequence[int]]]

# popcount of every byte value
_POPCOUNT = np.array([bin(value).count("1") for value in range(256)], dtype=np.uint8)
_ROW_CHUNK = 32


def _as_signs(matrix: MatrixLike) -> np.ndarray:
    """Return a square int8 sign array or raise NonSquare / NonSignEntries."""
    if isinstance(matrix, HadamardMatrix):
        return matrix.entries
    signs = np.asarray(matrix)
    if signs.ndim != 2 or signs.shape[0] != signs.shape[1]:
        raise NonSquareError(tuple(signs.shape))
    bad = np.unique(signs[~np.isin(signs, (-1, 1))])
    if bad.size:
        raise NonSignEntriesError(bad[:5].tolist())
    return signs.astype(np.int8)


def disagreement_counts(bits: np.ndarray, rows: slice) -> np.ndarray:
    """Positions where each row in ``rows`` differs from every row, from packed sign bits."""
    block = bits[rows]
    xor = np.bitwise_xor(block[:, None, :], bits[None, :, :])
    return _POPCOUNT[xor].sum(axis=2, dtype=np.int64)


def _packed_is_hadamard(bits: np.ndarray, order: int) -> bool:
    if order == 1:
        return True
    if order % 2:
        return False
    half = order // 2
    for start in range(0, order, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, order)
        counts = disagreement_counts(bits, slice(start, stop))
        expected = np.full_like(counts, half)
        expected[np.arange(stop - start), np.arange(start, stop)] = 0
        if not np.array_equal(counts, expected):
            return False
    return True


def is_hadamard(matrix: MatrixLike) -> bool:
    """True iff M * M^T == n * I exactly.

    Two +/-1 rows are orthogonal exactly when they disagree in half of
    their positions, so the check counts disagreements on packed bits.
    """
    if isinstance(matrix, HadamardMatrix):
        return _packed_is_hadamard(matrix.bits, matrix.order)
    signs = _as_signs(matrix)
    return _packed_is_hadamard(np.packbits(signs < 0, axis=1), signs.shape[0])


def sylvester(a: HadamardMatrix, b: HadamardMatrix) -> HadamardMatrix:
    """Kronecker product H(a) (x) H(b), a Hadamard matrix of order a.n * b.n."""
    entries = np.kron(a.entries, b.entries).astype(np.int8)
    return HadamardMatrix.from_signs(entries, Provenance.sylvester(a.provenance, b.provenance))


def _check_paley_modulus(q: int, residue: int) -> None:
    if not isprime(q):
        raise NotPrimeError(q)
    if q % 4 != residue:
        raise WrongResidueClassError(q, residue)


def _jacobsthal(q: int) -> np.ndarray:
    """Q[a, b] = chi(b - a) with chi the quadratic character of GF(q)."""
    chi = np.array([int(legendre_symbol(x, q)) for x in range(q)], dtype=np.int8)
    index = np.arange(q)
    return chi[(index[None, :] - index[:, None]) % q]


def paley1(q: int) -> HadamardMatrix:
    """Order q + 1 from a skew conference matrix, for prime q = 3 mod 4."""
    _check_paley_modulus(q, 3)
    order = q + 1
    skew = np.zeros((order, order), dtype=np.int8)
    skew[0, 1:] = 1
    skew[1:, 0] = -1
    skew[1:, 1:] = _jacobsthal(q)
    entries = skew + np.eye(order, dtype=np.int8)
    return HadamardMatrix.from_signs(entries, Provenance.paley1(q))


def paley2(q: int) -> HadamardMatrix:
    """Order 2(q + 1) from a symmetric conference matrix, for prime q = 1 mod 4."""
    _check_paley_modulus(q, 1)
    size = q + 1
    conference = np.zeros((size, size), dtype=np.int8)
    conference[0, 1:] = 1
    conference[1:, 0] = 1
    conference[1:, 1:] = _jacobsthal(q)
    identity = np.eye(size, dtype=np.int8)
    entries = np.block([
        [conference + identity, conference - identity],
        [conference - identity, -conference - identity],
    ]).astype(np.int8)
    return HadamardMatrix.from_signs(entries, Provenance.paley2(q))


def _base(order: int) -> HadamardMatrix:
    if order == 1:
        return HadamardMatrix.from_signs(np.ones((1, 1), dtype=np.int8), Provenance.base(1))
    return HadamardMatrix.from_signs(np.array([[1, 1], [1, -1]], dtype=np.int8), Provenance.base(2))


def load_hadamard(path: str) -> HadamardMatrix:
    """Read a +/- matrix file and accept it only if it is Hadamard."""
    signs = read_matrix_file(path)
    matrix = HadamardMatrix.from_signs(_as_signs(signs), Provenance.registry_file(str(path)))
    if not is_hadamard(matrix):
        raise NotHadamardError(matrix.order, str(path))
    return matrix


@lru_cache(maxsize=256)
def construct(provenance: Provenance) -> HadamardMatrix:
    """Execute a registry recipe."""
    kind = provenance.kind
    if kind == "base":
        return _base(int(provenance.params[0]))
    if kind == "sylvester":
        left, right = provenance.children
        return sylvester(construct(left), construct(right))
    if kind == "paley1":
        return paley1(int(provenance.params[0]))
    if kind == "paley2":
        return paley2(int(provenance.params[0]))
    if kind == "registry-file":
        return load_hadamard(str(provenance.params[0]))
    raise ValueError(f"Provenance '{provenance.describe()}' is not an executable recipe")


def transform(matrix: HadamardMatrix, ops: Iterable[TransformOp]) -> HadamardMatrix:
    """Apply row/column permutations and negations in order."""
    ops = list(ops)
    if not ops:
        return matrix
    n = matrix.order
    signs = np.array(matrix.entries, copy=True)
    for op in ops:
        if isinstance(op, (PermuteRows, PermuteCols)):
            kind = "row permutation" if isinstance(op, PermuteRows) else "column permutation"
            if sorted(op.permutation) != list(range(n)):
                raise IndexOutOfRangeError(kind, list(op.permutation), n)
            perm = list(op.permutation)
            signs = signs[perm, :] if isinstance(op, PermuteRows) else signs[:, perm]
        elif isinstance(op, (NegateRow, NegateCol)):
            kind = "row" if isinstance(op, NegateRow) else "column"
            if not 0 <= op.index < n:
                raise IndexOutOfRangeError(kind, op.index, n)
            if isinstance(op, NegateRow):
                signs[op.index, :] *= -1
            else:
                signs[:, op.index] *= -1
        else:
            raise TypeError(f"Unknown transform operation {op!r}")
    return HadamardMatrix.from_signs(signs, Provenance.transformed(matrix.provenance, len(ops)))


def normalization_ops(matrix: HadamardMatrix) -> List[TransformOp]:
    """Negations that make the first row and column all +1 (no permutations)."""
    signs = matrix.entries
    row_flips = signs[:, 0] < 0
    ops: List[TransformOp] = [NegateRow(int(r)) for r in np.nonzero(row_flips)[0]]
    first_row = signs[0, :] * (-1 if row_flips[0] else 1)
    ops.extend(NegateCol(int(c)) for c in np.nonzero(first_row < 0)[0])
    return ops


def normalize(matrix: HadamardMatrix) -> HadamardMatrix:
    """Equivalent matrix with an all-plus first row and first column."""
    return transform(matrix, normalization_ops(matrix))


@lru_cache(maxsize=128)
def _normalized(provenance: Provenance) -> HadamardMatrix:
    return normalize(construct(provenance))


@dataclass(frozen=True)
class OrderRegistry:
    """Orders we can construct, each with an executable recipe.

    Built once (single writer) and read-only afterwards. The member set
    is closed under products up to ``bound``.
    """

    bound: int
    recipes: Dict[int, Provenance] = field(repr=False)
    orders: Tuple[int, ...] = field(repr=False)
    extra: Tuple[int, ...] = ()

    @classmethod
    def build(cls, bound: int, extra_files: Sequence[str] = ()) -> "OrderRegistry":
        leaves: Dict[int, Provenance] = {1: Provenance.base(1), 2: Provenance.base(2)}

        odd_primes = [int(p) for p in get_sieve(max(bound, 2)).primes if p > 2]
        for q in odd_primes:
            if q % 4 == 3 and q + 1 <= bound:
                leaves.setdefault(q + 1, Provenance.paley1(q))
        for q in odd_primes:
            if q % 4 == 1 and 2 * (q + 1) <= bound:
                leaves.setdefault(2 * (q + 1), Provenance.paley2(q))

        extra_orders = []
        for path in extra_files:
            matrix = load_hadamard(path)
            extra_orders.append(matrix.order)
            if matrix.order <= bound:
                leaves.setdefault(matrix.order, matrix.provenance)

        known = np.zeros(bound + 1, dtype=bool)
        known[list(leaves)] = True
        factors: Dict[int, Tuple[int, int]] = {}
        members: List[int] = []
        for n in range(1, bound + 1):
            if not known[n]:
                continue
            members.append(n)
            if n == 1:
                continue
            for a in members[1:]:
                product = a * n
                if product > bound:
                    break
                if product not in factors:
                    factors[product] = (a, n)
                    known[product] = True

        recipes: Dict[int, Provenance] = {}
        for order in members:
            if order in (1, 2) or order not in factors:
                recipes[order] = leaves[order]
            else:
                a, b = factors[order]
                recipes[order] = Provenance.sylvester(recipes[a], recipes[b])

        logger.info(
            "Hadamard order registry built",
            bound=bound,
            members=len(members),
            extra_orders=extra_orders,
        )
        return cls(bound=bound, recipes=recipes, orders=tuple(members), extra=tuple(extra_orders))

    def __contains__(self, order: object) -> bool:
        return order in self.recipes

    def recipe(self, order: int) -> Provenance:
        if order not in self.recipes:
            raise OrderNotConstructibleError(order, "auto")
        return self.recipes[order]

    def matrix(self, order: int) -> HadamardMatrix:
        return construct(self.recipe(order))

    def normalized(self, order: int) -> HadamardMatrix:
        return _normalized(self.recipe(order))

    def n_bar(self, n: int) -> int:
        """Smallest registry order >= n."""
        if n < 1:
            raise InvalidParameterError("n", n, "must be at least 1")
        index = bisect_left(self.orders, n)
        if index >= len(self.orders):
            raise RegistryExhaustedError(n, self.bound)
        return self.orders[index]

    def n_under(self, n: int) -> int:
        """Largest registry order < n, or 0 when n = 1."""
        index = bisect_left(self.orders, n)
        return self.orders[index - 1] if index > 0 else 0

    def gap(self, n: int) -> int:
        return self.n_bar(n) - self.n_under(n)

    def c(self, n: int) -> Fraction:
        return Fraction(self.n_bar(n), n)


def n_bar(n: int, registry: Optional["OrderRegistry"] = None) -> int:
    return (registry or get_registry()).n_bar(n)


def generate(order: int, recipe: str = "auto", registry: Optional[OrderRegistry] = None) -> HadamardMatrix:
    """Build H(order) with a chosen recipe family."""
    registry = registry or get_registry()
    if recipe == "auto":
        return registry.matrix(order)
    if recipe == "sylvester":
        # pure Kronecker powers of H(2), never a registry recipe
        if order >= 1 and order & (order - 1) == 0:
            result = _base(1)
            for _ in range(order.bit_length() - 1):
                result = sylvester(result, _base(2))
            return result
        raise OrderNotConstructibleError(order, recipe)
    if recipe == "paley1":
        return paley1(order - 1)
    if recipe == "paley2":
        if order % 2:
            raise OrderNotConstructibleError(order, recipe)
        return paley2(order // 2 - 1)
    raise OrderNotConstructibleError(order, recipe)


@lru_cache(maxsize=1)
def get_registry() -> OrderRegistry:
    """Registry built from settings; computed once per process."""
    settings = get_settings().registry
    return OrderRegistry.build(settings.bound, tuple(settings.extra_files))
