"""
Physical target (spin system), compiled pulse programs and gate sequences.
"""

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Mapping, Optional, Tuple, Union

import numpy as np

from recoupler.core.exceptions import BadPairError, ProgramInvariantError
from recoupler.models.sign import Pair, Purpose, SignMatrix, Topology, ordered_pair


@dataclass(frozen=True)
class SpinSystem:
    """Spin count, Zeeman frequencies and secular ZZ couplings, all in rad/s (hbar = 1).

    Couplings are stored once per unordered pair with i < j.
    """

    n: int
    zeeman: Tuple[float, ...]
    couplings: Mapping[Pair, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"Spin count must be positive, got {self.n}")
        zeeman = tuple(float(w) for w in self.zeeman)
        if len(zeeman) != self.n:
            raise ValueError(f"Expected {self.n} Zeeman frequencies, got {len(zeeman)}")

        normalized: Dict[Pair, float] = {}
        for (i, j), g in self.couplings.items():
            if i == j:
                raise BadPairError(i, j, "self-coupling")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise BadPairError(i, j, f"spin index outside 1..{self.n}")
            key = ordered_pair(i, j)
            if key in normalized:
                raise BadPairError(i, j, "coupling listed twice")
            normalized[key] = float(g)

        object.__setattr__(self, "zeeman", zeeman)
        object.__setattr__(self, "couplings", MappingProxyType(dict(sorted(normalized.items()))))

    def coupling(self, i: int, j: int) -> float:
        return self.couplings.get(ordered_pair(i, j), 0.0)

    def coupled_pairs(self) -> Tuple[Pair, ...]:
        return tuple(pair for pair, g in self.couplings.items() if g != 0.0)

    def topology(self) -> Topology:
        return Topology.from_pairs(self.n, self.coupled_pairs(), "system")


@dataclass(frozen=True, eq=False)
class PulseProgram:
    """Equal-length intervals separated by simultaneous ideal X pulses.

    ``boundaries[b]`` holds the spins pulsed at boundary b: boundary 0
    precedes interval 1 and boundary m follows interval m.
    """

    n: int
    m: int
    interval_duration: float
    boundaries: Tuple[FrozenSet[int], ...]
    target: Purpose
    sign_matrix: Optional[SignMatrix] = None

    def __post_init__(self) -> None:
        boundaries = tuple(frozenset(int(s) for s in b) for b in self.boundaries)
        object.__setattr__(self, "boundaries", boundaries)

        if self.n < 1 or self.m < 1:
            raise ProgramInvariantError(f"Program needs n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        if len(boundaries) != self.m + 1:
            raise ProgramInvariantError(
                f"Program with {self.m} intervals needs {self.m + 1} boundaries, got {len(boundaries)}"
            )
        if not math.isfinite(self.interval_duration) or self.interval_duration <= 0:
            raise ProgramInvariantError(f"Interval duration must be positive, got {self.interval_duration}")
        for index, spins in enumerate(boundaries):
            outside = sorted(s for s in spins if not 1 <= s <= self.n)
            if outside:
                raise ProgramInvariantError(
                    f"Boundary {index} pulses spins {outside} outside 1..{self.n}",
                    {"boundary": index, "spins": outside},
                )
        odd = [spin for spin, count in self.pulses_per_spin().items() if count % 2]
        if odd:
            raise ProgramInvariantError(
                f"Spins {odd} receive an odd number of pulses", {"spins": odd}
            )

    def pulses_per_spin(self) -> Dict[int, int]:
        counts = {spin: 0 for spin in range(1, self.n + 1)}
        for spins in self.boundaries:
            for spin in spins:
                counts[spin] += 1
        return counts

    @property
    def pulse_count(self) -> int:
        return sum(len(b) for b in self.boundaries)

    @property
    def within_pulse_bound(self) -> bool:
        return self.pulse_count <= self.n * self.m

    @property
    def total_duration(self) -> float:
        return self.m * self.interval_duration

    def frame_flips(self) -> np.ndarray:
        """Boolean n x m array: True where spin i is flipped during interval a."""
        flips = np.zeros((self.n, self.m), dtype=bool)
        state = np.zeros(self.n, dtype=bool)
        for a in range(self.m):
            for spin in self.boundaries[a]:
                state[spin - 1] = ~state[spin - 1]
            flips[:, a] = state
        return flips

    def recover_sign_matrix(self) -> SignMatrix:
        """Rebuild the sign matrix from the pulse boundaries alone."""
        signs = np.where(self.frame_flips(), -1, 1).astype(np.int8)
        return SignMatrix(signs, self.target)

    def __repr__(self) -> str:
        return (
            f"PulseProgram(n={self.n}, m={self.m}, t={self.interval_duration!r}, "
            f"pulses={self.pulse_count}, target={self.target})"
        )


# Gate sequences for the dense oracle

@dataclass(frozen=True)
class Rotation:
    """Single-spin rotation exp(-i * angle/2 * sigma_axis)."""

    spin: int
    axis: str
    angle: float


@dataclass(frozen=True)
class CouplingGate:
    """The ZZ_ij primitive exp(-i pi/4 sigma_z^i sigma_z^j)."""

    i: int
    j: int


Gate = Union[Rotation, CouplingGate]


@dataclass(frozen=True)
class GateSequence:
    """Gates in time order: ``gates[0]`` acts first."""

    gates: Tuple[Gate, ...]
    label: str = ""

    @property
    def spins(self) -> FrozenSet[int]:
        found = set()
        for gate in self.gates:
            if isinstance(gate, Rotation):
                found.add(gate.spin)
            else:
                found.update((gate.i, gate.j))
        return frozenset(found)

    def without_coupling(self) -> "GateSequence":
        return GateSequence(
            tuple(g for g in self.gates if not isinstance(g, CouplingGate)),
            f"{self.label} without coupling",
        )

    def __len__(self) -> int:
        return len(self.gates)
