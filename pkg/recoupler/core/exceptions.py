"""
Custom exceptions for the compiler and verifier.
"""

from typing import Any, Dict, Optional


class RecouplerError(Exception):
    """Base exception for all recoupler errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


# Hadamard construction

class NotPrimeError(RecouplerError):
    """Raised when a Paley construction receives a composite modulus."""

    def __init__(self, q: int):
        super().__init__(f"{q} is not prime", {"q": q})


class WrongResidueClassError(RecouplerError):
    """Raised when q has the residue class of the other Paley construction."""

    def __init__(self, q: int, expected: int):
        super().__init__(
            f"q={q} is {q % 4} mod 4, this construction needs {expected} mod 4",
            {"q": q, "expected": expected},
        )


class NonSquareError(RecouplerError):
    """Raised when a matrix that must be square is not."""

    def __init__(self, shape: tuple):
        super().__init__(f"Matrix of shape {shape} is not square", {"shape": list(shape)})


class NonSignEntriesError(RecouplerError):
    """Raised when a matrix contains entries other than +1 and -1."""

    def __init__(self, bad_values: list):
        super().__init__(
            f"Matrix entries must be +1 or -1, found {bad_values}",
            {"bad_values": bad_values},
        )


class IndexOutOfRangeError(RecouplerError):
    """Raised when a transform references a row or column that does not exist."""

    def __init__(self, kind: str, index: Any, size: int):
        super().__init__(
            f"{kind} index {index} out of range for size {size}",
            {"kind": kind, "index": index, "size": size},
        )


class InvalidParameterError(RecouplerError):
    """Raised when a numeric argument is outside its allowed range."""

    def __init__(self, name: str, value: Any, reason: str):
        super().__init__(f"Invalid {name}={value}: {reason}", {"name": name, "value": value, "reason": reason})


class RegistryExhaustedError(RecouplerError):
    """Raised when no registry order at or above n exists within the bound."""

    def __init__(self, n: int, bound: int):
        super().__init__(
            f"No constructible Hadamard order >= {n} within registry bound {bound}",
            {"n": n, "bound": bound},
        )


# Sign matrices and pulse programs

class InvalidSpinCountError(RecouplerError):
    """Raised when a scheme is requested for too few spins."""

    def __init__(self, n: int, minimum: int = 2):
        super().__init__(f"Need at least {minimum} spins, got {n}", {"n": n, "minimum": minimum})


class BadPairError(RecouplerError):
    """Raised for a spin pair that is equal, out of range or not allowed."""

    def __init__(self, i: int, j: int, reason: str):
        super().__init__(f"Bad spin pair ({i}, {j}): {reason}", {"i": i, "j": j, "reason": reason})


class BadKError(RecouplerError):
    """Raised when a neighbour range k is out of bounds."""

    def __init__(self, k: int, n: int):
        super().__init__(f"Neighbour range k={k} must satisfy 1 <= k < n={n}", {"k": k, "n": n})


class NonPositiveDurationError(RecouplerError):
    """Raised when an interval duration is not strictly positive."""

    def __init__(self, duration: float):
        super().__init__(f"Interval duration must be > 0, got {duration}", {"duration": duration})


class ZeroCouplingError(RecouplerError):
    """Raised when a recoupling duration is requested for g = 0."""

    def __init__(self) -> None:
        super().__init__("Coupling constant must be nonzero")


class CouplingMismatchError(RecouplerError):
    """Raised when parallel recoupled pairs have couplings one duration cannot serve."""

    def __init__(self, pairs: list, couplings: list, tolerance: float):
        super().__init__(
            f"Parallel pairs {pairs} have couplings {couplings} rad/s; "
            f"they must agree within relative tolerance {tolerance}",
            {"pairs": [list(p) for p in pairs], "couplings": couplings, "tolerance": tolerance},
        )


class UncoupledPairError(RecouplerError):
    """Raised when recoupling is requested for a pair without coupling."""

    def __init__(self, i: int, j: int):
        super().__init__(f"Spins {i} and {j} are not coupled", {"i": i, "j": j})


class TopologyMismatchError(RecouplerError):
    """Raised when a system has couplings a restricted scheme cannot see."""

    def __init__(self, pairs: list):
        super().__init__(
            f"System couplings outside the scheme topology: {pairs}",
            {"pairs": [list(p) for p in pairs]},
        )


class SchemeConstructionError(RecouplerError):
    """Raised when a builder cannot produce a matrix passing validation."""

    def __init__(self, purpose: str, failures: list):
        super().__init__(
            f"Could not build a valid sign matrix for {purpose}",
            {"purpose": purpose, "failures": failures},
        )


# Verification

class TooManySpinsError(RecouplerError):
    """Raised when a brute-force oracle is asked for more spins than its cap."""

    def __init__(self, n: int, cap: int):
        super().__init__(f"{n} spins exceeds the simulation cap of {cap}", {"n": n, "cap": cap})


class TargetShapeMismatchError(RecouplerError):
    """Raised when a target does not fit the simulated system."""

    def __init__(self, message: str):
        super().__init__(message)


# Analysis

class BadProgressionError(RecouplerError):
    """Raised when an arithmetic progression is not coprime."""

    def __init__(self, a: int, q: int):
        super().__init__(f"Progression {a} mod {q} is not coprime", {"a": a, "q": q})


class DomainTooSmallError(RecouplerError):
    """Raised when a bound is evaluated below its domain."""

    def __init__(self, x: float, minimum: float):
        super().__init__(f"x={x} must exceed {minimum}", {"x": x, "minimum": minimum})


class SieveBoundError(RecouplerError):
    """Raised when a prime query exceeds the configured sieve bound."""

    def __init__(self, x: int, bound: int):
        super().__init__(f"x={x} exceeds sieve bound {bound}", {"x": x, "bound": bound})


# Documents

class DocumentError(RecouplerError):
    """Raised for a malformed input document."""

    def __init__(self, field: str, message: str, line: Optional[int] = None, source: Optional[str] = None):
        where = f" (line {line})" if line is not None else ""
        origin = f"{source}: " if source else ""
        super().__init__(
            f"{origin}field '{field}'{where}: {message}",
            {"field": field, "line": line, "source": source},
        )
        self.field = field
        self.line = line


class NotHadamardError(RecouplerError):
    """Raised when a loaded or supplied matrix fails the orthogonality check."""

    def __init__(self, order: int, source: Optional[str] = None):
        super().__init__(
            f"Matrix of order {order} is not Hadamard" + (f" ({source})" if source else ""),
            {"order": order, "source": source},
        )


class ProgramInvariantError(RecouplerError):
    """Raised when a pulse program violates its structural invariants."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)


class OrderNotConstructibleError(RecouplerError):
    """Raised when a requested order has no recipe of the requested kind."""

    def __init__(self, order: int, recipe: str):
        super().__init__(
            f"Order {order} cannot be built with recipe '{recipe}'",
            {"order": order, "recipe": recipe},
        )


class UsageError(RecouplerError):
    """Raised for command-line grammar errors."""

    def __init__(self, message: str):
        super().__init__(message)
