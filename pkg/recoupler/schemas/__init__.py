"""
Pydantic documents, requests and reports.
"""

from .analysis import (
    CTableSummary,
    GapStats,
    IntervalScan,
    PaleyReachability,
    PaleyScan,
    RosserCheck,
    RosserScan,
)
from .compile import CompileRequest, Operation
from .report import TrialReport, ValidationReport, VerificationReport, pair_key
from .system import CouplingEntry, SystemDocument

__all__ = [
    "CTableSummary",
    "GapStats",
    "IntervalScan",
    "PaleyReachability",
    "PaleyScan",
    "RosserCheck",
    "RosserScan",
    "CompileRequest",
    "Operation",
    "TrialReport",
    "ValidationReport",
    "VerificationReport",
    "pair_key",
    "CouplingEntry",
    "SystemDocument",
]
