"""
Pulse program emission, interval timing, the CNOT wrapper and end-to-end compilation.
"""

import math
from collections import Counter
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from recoupler.core.config import get_settings
from recoupler.core.exceptions import (
    BadPairError,
    CouplingMismatchError,
    InvalidParameterError,
    NonPositiveDurationError,
    TopologyMismatchError,
    UncoupledPairError,
    ZeroCouplingError,
)
from recoupler.models.program import CouplingGate, GateSequence, PulseProgram, Rotation, SpinSystem
from recoupler.models.sign import Purpose, SignMatrix, Topology
from recoupler.schemas.compile import CompileRequest, Operation
from recoupler.services import signmatrix
from recoupler.services.hadamard import OrderRegistry, get_registry
from recoupler.utils.logger import pulsegen_logger as logger

# Boundary b of an unsimplified schedule, pulses listed with multiplicity
Schedule = Tuple[Tuple[int, ...], ...]


def _check_duration(t: float) -> None:
    if not (t > 0 and math.isfinite(t)):
        raise NonPositiveDurationError(t)


def emit(matrix: SignMatrix, t: float) -> PulseProgram:
    """One X pulse per sign change, plus one before a leading and after a trailing minus."""
    _check_duration(t)
    negative = matrix.entries < 0
    n, m = negative.shape
    # pad with the +1 laboratory frame on both sides
    padded = np.zeros((n, m + 2), dtype=bool)
    padded[:, 1:-1] = negative
    changes = padded[:, 1:] != padded[:, :-1]
    boundaries = tuple(
        frozenset(int(s) + 1 for s in np.nonzero(changes[:, b])[0]) for b in range(m + 1)
    )
    program = PulseProgram(
        n=n,
        m=m,
        interval_duration=float(t),
        boundaries=boundaries,
        target=matrix.purpose,
        sign_matrix=matrix,
    )
    if not program.within_pulse_bound:
        logger.warning(
            "Pulse count exceeds n*m",
            pulses=program.pulse_count,
            bound=n * m,
            purpose=matrix.purpose.to_token(),
        )
    return program


def emit_unsimplified(matrix: SignMatrix) -> Schedule:
    """Two pulses around every interval with a minus sign, before any cancellation."""
    n, m = matrix.entries.shape
    boundaries: List[List[int]] = [[] for _ in range(m + 1)]
    for spin in range(1, n + 1):
        for a in np.nonzero(matrix.row(spin) < 0)[0]:
            boundaries[a].append(spin)
            boundaries[a + 1].append(spin)
    return tuple(tuple(sorted(b)) for b in boundaries)


def simplify(schedule: Schedule, t: float, purpose: Purpose, n: Optional[int] = None) -> PulseProgram:
    """Cancel pulse pairs on the same spin at the same boundary (X * X = I)."""
    _check_duration(t)
    boundaries = tuple(
        frozenset(spin for spin, count in Counter(b).items() if count % 2) for b in schedule
    )
    if n is None:
        n = max((spin for b in schedule for spin in b), default=0)
    return PulseProgram(
        n=n, m=len(schedule) - 1, interval_duration=float(t), boundaries=boundaries, target=purpose
    )


def interval_duration(g: float, m: int) -> float:
    """Smallest t > 0 with g * m * t = pi/4 (mod 2 pi)."""
    if g == 0:
        raise ZeroCouplingError()
    if m < 1:
        raise InvalidParameterError("m", m, "interval count must be positive")
    if g > 0:
        return math.pi / (4 * g * m)
    return 7 * math.pi / (4 * abs(g) * m)


def cnot_wrapper(i: int, j: int) -> GateSequence:
    """CNOT from control i to target j around one ZZ_ij, up to a global phase.

    Rotations are exp(-i angle/2 sigma_axis); ``gates[0]`` acts first.
    """
    if i == j:
        raise BadPairError(i, j, "control and target must differ")
    if i < 1 or j < 1:
        raise BadPairError(i, j, "spin indices start at 1")
    half = math.pi / 2
    return GateSequence(
        (
            Rotation(j, "y", half),
            CouplingGate(i, j),
            Rotation(j, "y", -half),
            Rotation(j, "x", half),
            Rotation(i, "y", -half),
            Rotation(i, "x", -half),
            Rotation(i, "y", half),
        ),
        f"cnot({i},{j})",
    )


def check_heteronuclear(system: SpinSystem, ratio: Optional[float] = None) -> float:
    """Worst ratio of Zeeman separation to the strongest coupling.

    Logs a warning when it falls below ``ratio`` (settings default).
    """
    threshold = get_settings().simulation.heteronuclear_ratio if ratio is None else ratio
    couplings = [abs(g) for g in system.couplings.values() if g != 0]
    if not couplings or system.n < 2:
        return math.inf
    separation = min(abs(a - b) for a, b in combinations(system.zeeman, 2))
    worst = separation / max(couplings)
    if worst < threshold:
        logger.warning(
            "Spins are not well separated in frequency",
            ratio=worst,
            threshold=threshold,
        )
    return worst


def _require_within(system: SpinSystem, topology: Topology) -> None:
    outside = [pair for pair in system.coupled_pairs() if pair not in topology]
    if outside:
        raise TopologyMismatchError(outside)


def _recoupling_duration(system: SpinSystem, pairs: Sequence[Tuple[int, int]], m: int) -> float:
    strengths = [system.coupling(i, j) for i, j in pairs]
    rtol = get_settings().compile.parallel_coupling_rtol
    if not all(math.isclose(g, strengths[0], rel_tol=rtol) for g in strengths[1:]):
        raise CouplingMismatchError(list(pairs), strengths, rtol)
    return interval_duration(strengths[0], m)


def compile(
    system: SpinSystem, request: CompileRequest, registry: Optional[OrderRegistry] = None
) -> PulseProgram:
    """Build the sign matrix the request calls for, time it and emit the program."""
    registry = registry or get_registry()
    n = system.n
    check_heteronuclear(system)

    if request.op is Operation.DECOUPLE:
        if request.knn is not None:
            topology = Topology.chain(n, request.knn)
            matrix = signmatrix.build_knn_decouple(n, request.knn, registry, topology)
            _require_within(system, topology)
        elif request.zeeman_free:
            matrix = signmatrix.build_decouple_zeeman(n, registry)
        else:
            matrix = signmatrix.build_decouple(n, registry)
        t = request.t if request.t is not None else get_settings().compile.default_duration_s
    else:
        pairs = request.pairs()
        for i, j in pairs:
            if i != j and 1 <= i <= n and 1 <= j <= n and system.coupling(i, j) == 0:
                raise UncoupledPairError(i, j)
        if request.knn is not None:
            topology = Topology.chain(n, request.knn)
            matrix = signmatrix.build_knn_recouple(n, request.knn, request.i, request.j, registry, topology)
            _require_within(system, topology)
        elif len(pairs) > 1:
            matrix = signmatrix.build_parallel_recouple(n, pairs, registry)
        else:
            matrix = signmatrix.build_recouple(n, request.i, request.j, registry)
        t = _recoupling_duration(system, matrix.purpose.pairs, matrix.m)

    program = emit(matrix, t)
    logger.info(
        "Compiled pulse program",
        purpose=matrix.purpose.to_token(),
        n=n,
        m=program.m,
        pulses=program.pulse_count,
        interval_duration_s=t,
    )
    return program
