"""
Core layer: configuration and the exception hierarchy shared by every service.
"""

from .config import (
    AnalysisSettings,
    CompileSettings,
    LoggingSettings,
    RegistrySettings,
    Settings,
    SimulationSettings,
    get_settings,
    is_production,
)
from .exceptions import (
    BadKError,
    BadPairError,
    BadProgressionError,
    CouplingMismatchError,
    DocumentError,
    DomainTooSmallError,
    IndexOutOfRangeError,
    InvalidParameterError,
    InvalidSpinCountError,
    NonPositiveDurationError,
    NotHadamardError,
    OrderNotConstructibleError,
    NonSignEntriesError,
    NonSquareError,
    NotPrimeError,
    ProgramInvariantError,
    RecouplerError,
    RegistryExhaustedError,
    SchemeConstructionError,
    SieveBoundError,
    TargetShapeMismatchError,
    TooManySpinsError,
    TopologyMismatchError,
    UsageError,
    UncoupledPairError,
    WrongResidueClassError,
    ZeroCouplingError,
)

__all__ = [
    # Configuration
    "Settings",
    "RegistrySettings",
    "SimulationSettings",
    "CompileSettings",
    "AnalysisSettings",
    "LoggingSettings",
    "get_settings",
    "is_production",

    # Exceptions
    "RecouplerError",
    "NotPrimeError",
    "WrongResidueClassError",
    "NonSquareError",
    "NonSignEntriesError",
    "IndexOutOfRangeError",
    "InvalidParameterError",
    "RegistryExhaustedError",
    "InvalidSpinCountError",
    "BadPairError",
    "BadKError",
    "NonPositiveDurationError",
    "ZeroCouplingError",
    "CouplingMismatchError",
    "UncoupledPairError",
    "TopologyMismatchError",
    "UsageError",
    "SchemeConstructionError",
    "NotHadamardError",
    "OrderNotConstructibleError",
    "ProgramInvariantError",
    "TooManySpinsError",
    "TargetShapeMismatchError",
    "BadProgressionError",
    "DomainTooSmallError",
    "SieveBoundError",
    "DocumentError",
]
