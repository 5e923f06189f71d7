"""
Spin system document schema.
Pydantic model for the operator-facing system description (frequencies in Hz)
"""

import math
import re
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from recoupler.models.program import SpinSystem
from recoupler.models.sign import Topology

_CHAIN = re.compile(r"^chain-(\d+)$")


class CouplingEntry(BaseModel):
    i: int = Field(..., ge=1, description="First spin (1-based)")
    j: int = Field(..., ge=1, description="Second spin (1-based)")
    g_hz: float = Field(..., description="Secular ZZ coupling in Hz")

    @field_validator("g_hz")
    @classmethod
    def validate_nonzero(cls, v: float) -> float:
        if v == 0 or not math.isfinite(v):
            raise ValueError("coupling must be finite and nonzero")
        return v


class SystemDocument(BaseModel):
    n: int = Field(..., ge=1, description="Number of spins")
    zeeman_hz: List[float] = Field(..., description="Zeeman frequency per spin in Hz")
    couplings: List[CouplingEntry] = Field(default_factory=list, description="Coupled pairs")
    topology: Optional[str] = Field(None, description="all-pairs or chain-K")

    @field_validator("topology")
    @classmethod
    def validate_topology(cls, v: Optional[str]) -> Optional[str]:
        if v is None or v == "all-pairs" or _CHAIN.match(v):
            return v
        raise ValueError(f"unknown topology '{v}', expected all-pairs or chain-K")

    @model_validator(mode="after")
    def validate_indices(self) -> "SystemDocument":
        if len(self.zeeman_hz) != self.n:
            raise ValueError(f"expected {self.n} Zeeman frequencies, got {len(self.zeeman_hz)}")
        seen = set()
        for entry in self.couplings:
            if entry.i > self.n or entry.j > self.n:
                raise ValueError(f"coupling ({entry.i}, {entry.j}) outside spins 1..{self.n}")
            if entry.i == entry.j:
                raise ValueError(f"coupling ({entry.i}, {entry.j}) is a self pair")
            key = (min(entry.i, entry.j), max(entry.i, entry.j))
            if key in seen:
                raise ValueError(f"coupling ({entry.i}, {entry.j}) listed twice")
            seen.add(key)
        return self

    def to_spin_system(self) -> SpinSystem:
        """Convert to internal units (rad/s)."""
        two_pi = 2 * math.pi
        return SpinSystem(
            n=self.n,
            zeeman=tuple(two_pi * f for f in self.zeeman_hz),
            couplings={(c.i, c.j): two_pi * c.g_hz for c in self.couplings},
        )

    def declared_topology(self) -> Optional[Topology]:
        if self.topology is None:
            return None
        if self.topology == "all-pairs":
            return Topology.all_pairs(self.n)
        return Topology.chain(self.n, int(_CHAIN.match(self.topology).group(1)))
