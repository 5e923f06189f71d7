"""
Compile request schema.
"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from recoupler.models.sign import Pair, ordered_pair


class Operation(str, Enum):
    DECOUPLE = "decouple"
    RECOUPLE = "recouple"


class CompileRequest(BaseModel):
    op: Operation = Field(..., description="What the program should do")
    i: Optional[int] = Field(None, description="First spin of the recoupled pair")
    j: Optional[int] = Field(None, description="Second spin of the recoupled pair")
    extra_pairs: List[Tuple[int, int]] = Field(
        default_factory=list, description="Further disjoint pairs recoupled in parallel"
    )
    t: Optional[float] = Field(None, gt=0, description="Interval duration in seconds (decoupling only)")
    knn: Optional[int] = Field(None, description="Neighbour range of a chain scheme")
    zeeman_free: bool = Field(default=False, description="Also remove Zeeman evolution when decoupling")

    @model_validator(mode="after")
    def validate_operation(self) -> "CompileRequest":
        if self.op is Operation.RECOUPLE:
            if self.i is None or self.j is None:
                raise ValueError("recouple needs both i and j")
            if self.t is not None:
                raise ValueError("recoupling derives t from the pair coupling; do not pass t")
            if self.knn is not None and self.extra_pairs:
                raise ValueError("chain schemes recouple a single pair")
        elif self.i is not None or self.j is not None or self.extra_pairs:
            raise ValueError("decouple takes no spin pair")
        if self.knn is not None and self.zeeman_free:
            raise ValueError("chain schemes do not remove Zeeman evolution")
        return self

    def pairs(self) -> Tuple[Pair, ...]:
        if self.op is Operation.DECOUPLE:
            return ()
        return ((self.i, self.j),) + tuple(ordered_pair(a, b) for a, b in self.extra_pairs)
