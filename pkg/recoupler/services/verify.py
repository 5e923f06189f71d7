"""
Two independent correctness checks for pulse programs.

The weight check counts sign agreements in exact integers. The oracle
simulates the evolution directly: the free Hamiltonian is diagonal in
the computational basis and ideal X pulses only flip bits, so the
propagator is a basis permutation times a phase per basis state.
"""

import math
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import expm

from recoupler.core.config import get_settings
from recoupler.core.exceptions import TargetShapeMismatchError, TooManySpinsError
from recoupler.models.program import CouplingGate, GateSequence, PulseProgram, Rotation, SpinSystem
from recoupler.models.sign import Pair, PurposeKind, SignMatrix, ordered_pair
from recoupler.schemas.report import TrialReport, VerificationReport, pair_key
from recoupler.services.pulsegen import emit
from recoupler.utils.logger import verify_logger as logger

_TARGET = re.compile(r"^(?P<kind>identity|zz|cnot)(?::(?P<args>.+))?$")


@dataclass(frozen=True)
class Target:
    """Ideal operation a program should implement.

    ``zz`` is the product of exp(-i pi/4 sigma_z sigma_z) over ``pairs``;
    ``cnot`` flips the second spin of its pair when the first is |1>.
    """

    kind: str = "identity"
    pairs: Tuple[Pair, ...] = ()

    @classmethod
    def identity(cls) -> "Target":
        return cls()

    @classmethod
    def zz(cls, *pairs: Pair) -> "Target":
        return cls("zz", tuple(ordered_pair(*p) for p in pairs))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Target":
        return cls("cnot", ((control, target),))

    @classmethod
    def parse(cls, token: str) -> "Target":
        """``identity``, ``zz:I,J[;K,L]`` or ``cnot:C,T``."""
        match = _TARGET.match(token.strip())
        if not match:
            raise ValueError(f"Unrecognised target '{token}'")
        kind = match.group("kind")
        pairs = []
        for part in filter(None, (match.group("args") or "").split(";")):
            a, b = (int(x) for x in part.split(","))
            pairs.append((a, b))
        if kind == "identity":
            return cls.identity()
        if kind == "cnot":
            if len(pairs) != 1:
                raise ValueError("cnot target takes exactly one control,target pair")
            return cls.cnot(*pairs[0])
        if not pairs:
            raise ValueError("zz target needs at least one pair")
        return cls.zz(*pairs)

    @classmethod
    def for_program(cls, program: PulseProgram) -> "Target":
        kind = program.target.kind
        if kind in (PurposeKind.RECOUPLE, PurposeKind.KNN_RECOUPLE):
            return cls.zz(*program.target.pairs)
        return cls.identity()

    def to_token(self) -> str:
        if self.kind == "identity":
            return "identity"
        return self.kind + ":" + ";".join(f"{a},{b}" for a, b in self.pairs)

    @property
    def spins(self) -> Tuple[int, ...]:
        return tuple(sorted({s for pair in self.pairs for s in pair}))

    def restricted(self, spins: Sequence[int]) -> "Target":
        """The part of a diagonal target acting inside ``spins``."""
        inside = set(spins)
        kept = tuple(p for p in self.pairs if set(p) <= inside)
        return Target(self.kind, kept) if kept else Target.identity()


@dataclass(frozen=True)
class SimulationResult:
    """U|b> = exp(i phases[b]) |permutation[b]> on the spins listed in ``spins``.

    Basis index bits run from the first listed spin (most significant)
    to the last; bit value 0 is sigma_z = +1.
    """

    spins: Tuple[int, ...]
    permutation: np.ndarray
    phases: np.ndarray

    @property
    def n(self) -> int:
        return len(self.spins)

    @property
    def is_diagonal(self) -> bool:
        return bool(np.array_equal(self.permutation, np.arange(self.permutation.size)))


def _z_signs(n: int) -> np.ndarray:
    """n x 2^n array: +1 where spin bit is 0, -1 where it is 1."""
    states = np.arange(1 << n)
    shifts = np.arange(n - 1, -1, -1)
    bits = (states[None, :] >> shifts[:, None]) & 1
    return (1 - 2 * bits).astype(np.int8)


def _masks(program: PulseProgram, index: Dict[int, int], n: int) -> np.ndarray:
    masks = np.zeros(program.m + 1, dtype=np.int64)
    for b, pulsed in enumerate(program.boundaries):
        for spin in pulsed:
            if spin in index:
                masks[b] |= 1 << (n - 1 - index[spin])
    return masks


def _coupling_energies(system: SpinSystem, spins: Sequence[int], z: np.ndarray) -> np.ndarray:
    """Diagonal of sum_ij g_ij Z_i Z_j on the listed spins."""
    energy = np.zeros(z.shape[1], dtype=np.float64)
    for (a, i), (b, j) in combinations(enumerate(spins), 2):
        g = system.coupling(i, j)
        if g:
            energy += g * (z[a] * z[b])
    return energy


def simulate_restricted(system: SpinSystem, program: PulseProgram, spins: Sequence[int]) -> SimulationResult:
    """Evolve the sub-system on ``spins`` under the program.

    All terms commute, so the phases of the full evolution are sums of
    the sub-system phases; a pairwise run is exact for that pair.
    Zeeman terms are tallied as integer sign sums per basis state and
    scaled once at the end.
    """
    spins = tuple(spins)
    n = len(spins)
    cap = get_settings().simulation.max_spins
    if n > cap:
        raise TooManySpinsError(n, cap)
    if system.n != program.n:
        raise TargetShapeMismatchError(f"System has {system.n} spins, program has {program.n}")

    t = program.interval_duration
    z = _z_signs(n)
    coupling = _coupling_energies(system, spins, z)
    masks = _masks(program, {spin: a for a, spin in enumerate(spins)}, n)
    precessing = [a for a, spin in enumerate(spins) if system.zeeman[spin - 1]]

    start = np.arange(1 << n, dtype=np.int64)
    current = start.copy()
    phases = np.zeros(1 << n, dtype=np.float64)
    tally = np.zeros((len(precessing), 1 << n), dtype=np.int32)
    for a in range(program.m):
        current ^= masks[a]
        phases -= t * coupling[current]
        for row, spin_index in enumerate(precessing):
            tally[row] += z[spin_index, current]
    current ^= masks[program.m]

    # H contains -1/2 w Z, so each interval adds +1/2 w t z to the phase
    for row, spin_index in enumerate(precessing):
        omega = system.zeeman[spins[spin_index] - 1]
        phases += 0.5 * omega * t * tally[row]

    permutation = np.empty_like(current)
    permutation[start] = current
    return SimulationResult(spins=spins, permutation=permutation, phases=phases)


def simulate(system: SpinSystem, program: PulseProgram) -> SimulationResult:
    """Brute-force evolution of all spins."""
    return simulate_restricted(system, program, range(1, program.n + 1))


def weights(matrix: SignMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Exact w = S S^T (pair weights) and z = row sums."""
    signs = matrix.entries.astype(np.int64)
    return signs @ signs.T, signs.sum(axis=1)


def closed_form_phases(
    matrix: SignMatrix, system: SpinSystem, t: float, spins: Optional[Sequence[int]] = None
) -> np.ndarray:
    """Per-basis-state phase predicted from the integer weights alone."""
    spins = tuple(spins or range(1, matrix.n + 1))
    w, zsum = weights(matrix)
    z = _z_signs(len(spins))
    phases = np.zeros(z.shape[1], dtype=np.float64)
    for a, spin in enumerate(spins):
        phases += 0.5 * t * system.zeeman[spin - 1] * int(zsum[spin - 1]) * z[a]
    for (a, i), (b, j) in combinations(enumerate(spins), 2):
        g = system.coupling(i, j)
        if g:
            phases -= t * g * int(w[i - 1, j - 1]) * z[a] * z[b]
    return phases


def _wrap(values: np.ndarray) -> np.ndarray:
    """Map angles into (-pi, pi]."""
    wrapped = np.mod(values + np.pi, 2 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def target_phases(target: Target, spins: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """(permutation, phases) of a target on the listed spins."""
    spins = tuple(spins)
    n = len(spins)
    index = {spin: a for a, spin in enumerate(spins)}
    missing = [s for s in target.spins if s not in index]
    if missing:
        raise TargetShapeMismatchError(f"Target {target.to_token()} acts on spins {missing} outside {list(spins)}")

    states = np.arange(1 << n, dtype=np.int64)
    phases = np.zeros(1 << n, dtype=np.float64)
    if target.kind == "zz":
        z = _z_signs(n)
        for i, j in target.pairs:
            phases -= (np.pi / 4) * z[index[i]] * z[index[j]]
        return states, phases
    if target.kind == "cnot":
        (control, flip), = target.pairs
        control_bit = 1 << (n - 1 - index[control])
        flip_bit = 1 << (n - 1 - index[flip])
        return np.where(states & control_bit, states ^ flip_bit, states), phases
    return states, phases


def compare_to_target(result: SimulationResult, target: Target) -> float:
    """Largest phase deviation from the target after removing the global phase.

    Both sides are referenced to basis state 0. A permutation mismatch
    counts as deviation pi.
    """
    permutation, phases = target_phases(target, result.spins)
    if not np.array_equal(permutation, result.permutation):
        return math.pi
    relative = (result.phases - result.phases[0]) - (phases - phases[0])
    return float(np.max(np.abs(_wrap(relative)))) if relative.size else 0.0


# Dense gate oracle

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _embed(operators: Dict[int, np.ndarray], spins: Sequence[int]) -> np.ndarray:
    result = np.eye(1, dtype=complex)
    for spin in spins:
        result = np.kron(result, operators.get(spin, np.eye(2, dtype=complex)))
    return result


def gate_matrix(gate: Union[Rotation, CouplingGate], spins: Sequence[int]) -> np.ndarray:
    if isinstance(gate, Rotation):
        generator = _embed({gate.spin: _PAULI[gate.axis]}, spins)
        return expm(-0.5j * gate.angle * generator)
    generator = _embed({gate.i: _PAULI["z"], gate.j: _PAULI["z"]}, spins)
    return expm(-0.25j * np.pi * generator)


def sequence_matrix(sequence: GateSequence, spins: Sequence[int]) -> np.ndarray:
    unitary = np.eye(1 << len(spins), dtype=complex)
    for gate in sequence.gates:
        unitary = gate_matrix(gate, spins) @ unitary
    return unitary


def target_matrix(target: Target, spins: Sequence[int]) -> np.ndarray:
    permutation, phases = target_phases(target, spins)
    size = permutation.size
    dense = np.zeros((size, size), dtype=complex)
    dense[permutation, np.arange(size)] = np.exp(1j * phases)
    return dense


def dense_gate_check(
    sequence: GateSequence,
    target: Optional[Target] = None,
    spins: Optional[Iterable[int]] = None,
) -> float:
    """Entrywise max |U - e^{i phi} T| with the best global phase phi.

    The target defaults to the CNOT named by a ``cnot(i,j)`` label, and
    to the identity otherwise.
    """
    if target is None:
        match = re.match(r"^cnot\((\d+),(\d+)\)$", sequence.label)
        target = Target.cnot(int(match.group(1)), int(match.group(2))) if match else Target.identity()
    spins = tuple(sorted(set(spins) if spins is not None else sequence.spins | set(target.spins)))
    cap = get_settings().simulation.dense_max_spins
    if len(spins) > cap:
        raise TooManySpinsError(len(spins), cap)

    unitary = sequence_matrix(sequence, spins)
    ideal = target_matrix(target, spins)
    overlap = np.trace(ideal.conj().T @ unitary)
    phase = np.exp(1j * np.angle(overlap)) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(unitary - phase * ideal)))


# Randomized agreement trials

def _run_trial(matrix: SignMatrix, seed: np.random.SeedSequence) -> float:
    rng = np.random.default_rng(seed)
    n = matrix.n
    zeeman = tuple(rng.uniform(-1.0, 1.0, n) * 2 * np.pi * 200.0)
    couplings = {
        pair: float(rng.uniform(-1.0, 1.0) * 2 * np.pi * 50.0)
        for pair in combinations(range(1, n + 1), 2)
    }
    t = float(10 ** rng.uniform(-5, -2))
    system = SpinSystem(n=n, zeeman=zeeman, couplings=couplings)

    program = emit(matrix, t)
    simulated = simulate(system, program).phases
    predicted = closed_form_phases(matrix, system, t)
    return float(np.max(np.abs(_wrap(simulated - predicted))))


def run_trials(
    matrix: SignMatrix,
    trials: int = 100,
    seed: int = 0,
    n_jobs: Optional[int] = None,
    tolerance: float = 1e-12,
) -> TrialReport:
    """Compare closed-form and simulated phases over random (omega, g, t) draws."""
    n_jobs = get_settings().simulation.n_jobs if n_jobs is None else n_jobs
    children = np.random.SeedSequence(seed).spawn(trials)
    deviations = Parallel(n_jobs=n_jobs)(delayed(_run_trial)(matrix, child) for child in children)
    report = TrialReport(
        trials=trials,
        seed=seed,
        max_deviation=max(deviations, default=0.0),
        tolerance=tolerance,
    )
    logger.info("Randomized verification trials", trials=trials, seed=seed, max_deviation=report.max_deviation)
    return report


# Program verification

def _coupling_only(system: SpinSystem) -> SpinSystem:
    return SpinSystem(system.n, (0.0,) * system.n, dict(system.couplings))


def _zeeman_only(system: SpinSystem) -> SpinSystem:
    return SpinSystem(system.n, system.zeeman, {})


def _oracle_deviations(
    system: SpinSystem, program: PulseProgram, target: Target
) -> Tuple[str, float, float, float]:
    cap = get_settings().simulation.max_spins
    if program.n <= cap:
        coupling = compare_to_target(simulate(_coupling_only(system), program), target)
        zeeman = compare_to_target(simulate(_zeeman_only(system), program), Target.identity())
        full = compare_to_target(simulate(system, program), target)
        return "full", coupling, zeeman, full

    coupling_only = _coupling_only(system)
    zeeman_only = _zeeman_only(system)
    coupling = 0.0
    for pair in system.coupled_pairs():
        result = simulate_restricted(coupling_only, program, pair)
        coupling = max(coupling, compare_to_target(result, target.restricted(pair)))
    zeeman = 0.0
    for spin in range(1, program.n + 1):
        result = simulate_restricted(zeeman_only, program, (spin,))
        zeeman = max(zeeman, compare_to_target(result, Target.identity()))
    return "restricted", coupling, zeeman, max(coupling, zeeman)


def verify_program(
    system: SpinSystem,
    program: PulseProgram,
    target: Optional[Target] = None,
    oracle: bool = True,
    tolerance: Optional[float] = None,
) -> VerificationReport:
    """Weights check, then (optionally) the simulation oracle.

    Coupling and Zeeman phases are checked separately; the Zeeman
    verdict only applies when the program's purpose removes Zeeman
    evolution.
    """
    if system.n != program.n:
        raise TargetShapeMismatchError(f"System has {system.n} spins, program has {program.n}")
    tolerance = get_settings().simulation.phase_tolerance if tolerance is None else tolerance
    target = target or Target.for_program(program)
    if target.kind == "cnot":
        raise TargetShapeMismatchError("A pulse program is diagonal; compare CNOT with dense_gate_check")
    outside = [s for s in target.spins if not 1 <= s <= program.n]
    if outside:
        raise TargetShapeMismatchError(f"Target {target.to_token()} acts on spins {outside} outside 1..{program.n}")

    matrix = program.sign_matrix if program.sign_matrix is not None else program.recover_sign_matrix()
    w, z = weights(matrix)
    zz_pairs = set(target.pairs)

    coupling_weights: Dict[str, int] = {}
    weights_ok = True
    for i, j in system.coupled_pairs():
        value = int(w[i - 1, j - 1])
        coupling_weights[pair_key(i, j)] = value
        expected = matrix.m if (i, j) in zz_pairs else 0
        weights_ok &= value == expected

    report = VerificationReport(
        n=program.n,
        m=program.m,
        purpose=program.target.to_token(),
        target=target.to_token(),
        interval_duration_s=program.interval_duration,
        coupling_weights=coupling_weights,
        zeeman_weights={str(spin): int(v) for spin, v in enumerate(z, start=1)},
        tolerance=tolerance,
    )
    report.verdicts["coupling_weights"] = weights_ok
    zeeman_required = program.target.requires_zeeman_free
    if zeeman_required:
        report.verdicts["zeeman_weights"] = bool(np.all(z == 0))
    report.verdicts["pulse_parity"] = all(c % 2 == 0 for c in program.pulses_per_spin().values())
    if not program.within_pulse_bound:
        report.notes.append(f"{program.pulse_count} pulses exceed n*m = {program.n * program.m}")

    if oracle:
        mode, coupling, zeeman, full = _oracle_deviations(system, program, target)
        report.oracle = mode
        report.coupling_phase_deviation = coupling
        report.zeeman_phase_deviation = zeeman
        report.oracle_max_phase_dev = full if zeeman_required else coupling
        report.verdicts["coupling_phase"] = coupling < tolerance
        if zeeman_required:
            report.verdicts["zeeman_phase"] = zeeman < tolerance
        else:
            report.notes.append("Zeeman evolution is not removed by this purpose; its phase is reported only")

    logger.info(
        "Verification finished",
        purpose=report.purpose,
        target=report.target,
        passed=report.passed,
        oracle=report.oracle,
    )
    return report
