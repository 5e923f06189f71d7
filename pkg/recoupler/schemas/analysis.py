"""
Order-statistics and prime-counting report schemas.
"""

from typing import List, Optional

from pydantic import BaseModel, Field


class GapStats(BaseModel):
    n: int
    n_under: int = Field(..., description="Largest registry order below n (0 for n = 1)")
    n_over: int = Field(..., description="Smallest registry order at or above n")
    delta: int = Field(..., description="n_over - n_under")
    c_fraction: str = Field(..., description="n_over / n as a reduced fraction")
    c: float


class CTableSummary(BaseModel):
    max_n: int
    max_c: float
    max_c_at: int
    median_c: float
    count_c_above_1_1: int
    max_gap_below_1000: Optional[int] = None
    max_gap_below_10000: Optional[int] = None
    literature_max_gap_1000: int
    literature_max_gap_10000: int
    all_c_below_2: bool
    notes: List[str] = Field(default_factory=list)


class RosserCheck(BaseModel):
    x: int
    lower: float
    pi: int
    upper: float
    holds: bool


class RosserScan(BaseModel):
    start: int
    stop: int
    checked: int
    failures: List[int] = Field(default_factory=list, description="x where the double inequality fails")

    @property
    def all_hold(self) -> bool:
        return not self.failures


class IntervalScan(BaseModel):
    start: int
    stop: int
    margin: float
    checked: int
    misses: List[int] = Field(default_factory=list, description="n with no prime in (n, n(1+eps)]")


class PaleyReachability(BaseModel):
    n: int
    r: int
    epsilon: float
    window_high: int
    primes_found: int
    primes_3mod4: int
    has_3mod4: bool
    n_bar: Optional[int] = None
    bound_holds: Optional[bool] = None


class PaleyScan(BaseModel):
    start: int
    stop: int
    r: int
    checked: int
    fraction_with_3mod4: float
    expected_lower: float = Field(..., description="1 - 2^-r")
    holds: bool
    bound_failures: List[int] = Field(default_factory=list)
