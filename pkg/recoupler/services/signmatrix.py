"""
Sign-matrix builders for every scheme variant and the purpose-driven validity check.

Builders draw rows from a normalized Hadamard matrix: row 0 is the
all-plus row, every other row sums to zero, and any two rows are
orthogonal. Spins are numbered from 1; Hadamard rows from 0.
"""

from typing import Dict, List, Optional, Sequence

import numpy as np

from recoupler.core.exceptions import (
    BadKError,
    BadPairError,
    InvalidParameterError,
    InvalidSpinCountError,
    NotHadamardError,
    SchemeConstructionError,
)
from recoupler.models.hadamard import HadamardMatrix
from recoupler.models.sign import Pair, Purpose, PurposeKind, SignMatrix, Topology, ordered_pair
from recoupler.schemas.report import ValidationReport, pair_key
from recoupler.services.hadamard import OrderRegistry, get_registry, is_hadamard, normalize
from recoupler.utils.logger import signmatrix_logger as logger


def _check_n(n: int) -> None:
    if n < 2:
        raise InvalidSpinCountError(n)


def _check_pair(n: int, i: int, j: int) -> Pair:
    if i == j:
        raise BadPairError(i, j, "spins must differ")
    if not (1 <= i <= n and 1 <= j <= n):
        raise BadPairError(i, j, f"spin index outside 1..{n}")
    return ordered_pair(i, j)


def _check_k(n: int, k: int) -> None:
    if not 1 <= k < n:
        raise BadKError(k, n)


def _source_rows(order: int, registry: OrderRegistry, source: Optional[HadamardMatrix]) -> np.ndarray:
    """Normalized H(order), from the registry or from a caller-supplied matrix."""
    if source is None:
        return registry.normalized(order).entries
    if source.order != order:
        raise InvalidParameterError("source order", source.order, f"this scheme needs order {order}")
    if not is_hadamard(source):
        raise NotHadamardError(source.order, "source matrix")
    return normalize(source).entries


def _assemble(
    purpose: Purpose,
    order: int,
    rows: Sequence[int],
    registry: OrderRegistry,
    source: Optional[HadamardMatrix] = None,
) -> SignMatrix:
    hadamard = _source_rows(order, registry, source)
    return SignMatrix(hadamard[list(rows)], purpose, order, tuple(rows))


def _ensure_valid(matrix: SignMatrix, topology: Topology) -> SignMatrix:
    report = validate(matrix, topology)
    if not report.passed:
        raise SchemeConstructionError(matrix.purpose.to_token(), report.failures)
    return matrix


def zeeman_free_order(n: int, registry: OrderRegistry) -> int:
    """Interval count for Zeeman-free decoupling: the all-plus row is unusable."""
    order = registry.n_bar(n)
    return order if n < order else registry.n_bar(n + 1)


def build_decouple(
    n: int, registry: Optional[OrderRegistry] = None, source: Optional[HadamardMatrix] = None
) -> SignMatrix:
    """The first n rows of a normalized H(n_bar(n))."""
    _check_n(n)
    registry = registry or get_registry()
    order = registry.n_bar(n)
    matrix = _assemble(Purpose.decouple(), order, range(n), registry, source)
    return _ensure_valid(matrix, Topology.all_pairs(n))


def build_decouple_zeeman(
    n: int, registry: Optional[OrderRegistry] = None, source: Optional[HadamardMatrix] = None
) -> SignMatrix:
    """Rows 2..n+1 of a normalized Hadamard matrix, so every row sums to zero."""
    _check_n(n)
    registry = registry or get_registry()
    order = zeeman_free_order(n, registry)
    matrix = _assemble(Purpose.decouple_zeeman_free(), order, range(1, n + 1), registry, source)
    return _ensure_valid(matrix, Topology.all_pairs(n))


def _shared_row_assignment(n: int, pairs: Sequence[Pair]) -> List[int]:
    """Distinct non-all-plus rows per spin, partners in a pair sharing one row.

    Rows are handed out in spin order, lowest index first.
    """
    partner: Dict[int, int] = {}
    for i, j in pairs:
        partner[j] = i
    assignment: Dict[int, int] = {}
    next_row = 1
    for spin in range(1, n + 1):
        if spin in partner:
            assignment[spin] = assignment[partner[spin]]
        else:
            assignment[spin] = next_row
            next_row += 1
    return [assignment[spin] for spin in range(1, n + 1)]


def build_recouple(
    n: int,
    i: int,
    j: int,
    registry: Optional[OrderRegistry] = None,
    source: Optional[HadamardMatrix] = None,
) -> SignMatrix:
    """Spins i and j share one row; everyone else gets a distinct zero-sum row."""
    _check_n(n)
    pair = _check_pair(n, i, j)
    return build_parallel_recouple(n, [pair], registry, source)


def build_parallel_recouple(
    n: int,
    pairs: Sequence[Pair],
    registry: Optional[OrderRegistry] = None,
    source: Optional[HadamardMatrix] = None,
) -> SignMatrix:
    """Recouple several disjoint pairs at once with m = n_bar(n)."""
    _check_n(n)
    if not pairs:
        raise BadPairError(0, 0, "no pair to recouple")
    checked = [_check_pair(n, i, j) for i, j in pairs]
    used: Dict[int, Pair] = {}
    for pair in checked:
        for spin in pair:
            if spin in used:
                raise BadPairError(pair[0], pair[1], f"spin {spin} already paired in {used[spin]}")
            used[spin] = pair

    registry = registry or get_registry()
    order = registry.n_bar(n)
    rows = _shared_row_assignment(n, checked)
    matrix = _assemble(Purpose.recouple(*checked), order, rows, registry, source)
    return _ensure_valid(matrix, Topology.all_pairs(n))


def _cyclic_rows(n: int, period: int, offset: int = 0) -> List[int]:
    return [offset + (spin - 1) % period for spin in range(1, n + 1)]


def build_knn_decouple(
    n: int, k: int, registry: Optional[OrderRegistry] = None, topology: Optional[Topology] = None
) -> SignMatrix:
    """Cycle through the rows of a small Hadamard matrix along a chain.

    Spin i gets row (i - 1) mod p. The period starts at k + 1, the
    smallest that separates every pair within distance k, and grows
    until the assignment passes validation on ``topology`` (a chain
    with |i - j| <= k by default).
    """
    _check_n(n)
    _check_k(n, k)
    registry = registry or get_registry()
    topology = topology or Topology.chain(n, k)
    purpose = Purpose.knn_decouple(k)

    failures: List[str] = []
    for period in range(k + 1, n + 1):
        order = registry.n_bar(period)
        matrix = _assemble(purpose, order, _cyclic_rows(n, period), registry)
        report = validate(matrix, topology)
        if report.passed:
            if period > k + 1:
                logger.info("Widened chain decoupling period", k=k, period=period, m=order)
            return matrix
        failures = report.failures
    raise SchemeConstructionError(purpose.to_token(), failures)


def build_knn_recouple(
    n: int,
    k: int,
    i: int,
    j: int,
    registry: Optional[OrderRegistry] = None,
    topology: Optional[Topology] = None,
) -> SignMatrix:
    """Chain decoupling pattern plus one fresh row shared by the recoupled pair.

    With k >= n - 1 every pair is coupled and the full recoupling
    scheme is used instead.
    """
    _check_n(n)
    _check_k(n, k)
    pair = _check_pair(n, i, j)
    topology = topology or Topology.chain(n, k)
    if pair not in topology:
        raise BadPairError(i, j, f"pair is not coupled in topology {topology.label}")

    registry = registry or get_registry()
    purpose = Purpose.knn_recouple(k, *pair)
    if k >= n - 1:
        full = build_recouple(n, pair[0], pair[1], registry)
        return _ensure_valid(
            SignMatrix(full.entries, purpose, full.source_order, full.source_rows), topology
        )

    failures: List[str] = []
    for period in range(k + 1, n + 1):
        order = registry.n_bar(period + 1)
        rows = _cyclic_rows(n, period)
        rows[pair[0] - 1] = rows[pair[1] - 1] = period
        matrix = _assemble(purpose, order, rows, registry)
        report = validate(matrix, topology)
        if report.passed:
            if period > k + 1:
                logger.info("Widened chain recoupling period", k=k, period=period, m=order)
            return matrix
        failures = report.failures
    raise SchemeConstructionError(purpose.to_token(), failures)


def interval_count(purpose: Purpose, n: int, registry: Optional[OrderRegistry] = None) -> int:
    """The m a builder emits for ``purpose`` on n spins (chain topologies for knn)."""
    registry = registry or get_registry()
    kind = purpose.kind
    if kind in (PurposeKind.DECOUPLE, PurposeKind.RECOUPLE):
        return registry.n_bar(n)
    if kind is PurposeKind.DECOUPLE_ZEEMAN_FREE:
        return zeeman_free_order(n, registry)
    k = purpose.k or 0
    if kind is PurposeKind.KNN_DECOUPLE:
        return registry.n_bar(min(k + 1, n))
    if k >= n - 1:
        return registry.n_bar(n)
    return registry.n_bar(k + 2)


def validate(matrix: SignMatrix, topology: Optional[Topology] = None) -> ValidationReport:
    """Check agreement counts on coupled pairs and, when required, zero row sums."""
    topology = topology or Topology.all_pairs(matrix.n)
    purpose = matrix.purpose
    m = matrix.m
    signs = matrix.entries.astype(np.int64)
    gram = signs @ signs.T
    row_sums = signs.sum(axis=1)

    failures: List[str] = []
    if topology.n != matrix.n:
        failures.append(f"topology covers {topology.n} spins, matrix has {matrix.n} rows")

    agreements: Dict[str, int] = {}
    for i, j in topology.sorted_pairs():
        if j > matrix.n:
            continue
        # agreements - disagreements = w, agreements + disagreements = m
        agree = int((m + gram[i - 1, j - 1]) // 2)
        agreements[pair_key(i, j)] = agree
        if (i, j) in purpose.recoupled:
            if agree != m:
                failures.append(f"pair ({i},{j}) must agree in all {m} intervals, agrees in {agree}")
        elif 2 * agree != m:
            failures.append(f"pair ({i},{j}) must agree in {m}/2 intervals, agrees in {agree}")

    for i, j in purpose.pairs:
        if (i, j) not in topology:
            failures.append(f"recoupled pair ({i},{j}) is not coupled in topology {topology.label}")

    if purpose.requires_zeeman_free:
        for spin, total in enumerate(row_sums.tolist(), start=1):
            if total != 0:
                failures.append(f"row {spin} sums to {total}, Zeeman evolution survives")

    return ValidationReport(
        purpose=purpose.to_token(),
        topology=topology.label,
        n=matrix.n,
        m=m,
        agreements=agreements,
        row_sums=[int(v) for v in row_sums],
        failures=failures,
    )
