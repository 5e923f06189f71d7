"""
Validation and verification report schemas.
Pair-keyed maps use "i,j" string keys so reports serialize to plain JSON.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, computed_field


def pair_key(i: int, j: int) -> str:
    return f"{i},{j}"


class ValidationReport(BaseModel):
    purpose: str = Field(..., description="Purpose token of the checked sign matrix")
    topology: str = Field(..., description="Label of the coupled-pair set")
    n: int
    m: int
    agreements: Dict[str, int] = Field(default_factory=dict, description="Agreement count per coupled pair")
    row_sums: List[int] = Field(default_factory=list)
    failures: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.failures


class TrialReport(BaseModel):
    trials: int
    seed: int
    max_deviation: float = Field(..., description="Largest closed-form vs oracle phase gap (rad)")
    tolerance: float

    @computed_field
    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance


class VerificationReport(BaseModel):
    n: int
    m: int
    purpose: str
    target: str
    interval_duration_s: Optional[float] = None
    coupling_weights: Dict[str, int] = Field(default_factory=dict, description="w_ij = sum_a s_ia s_ja")
    zeeman_weights: Dict[str, int] = Field(default_factory=dict, description="z_i = sum_a s_ia")
    oracle: Optional[str] = Field(None, description="full, restricted or None when not run")
    coupling_phase_deviation: Optional[float] = None
    zeeman_phase_deviation: Optional[float] = None
    oracle_max_phase_dev: Optional[float] = None
    tolerance: float = 1e-10
    trials: Optional[TrialReport] = None
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())
