"""Custom exceptions for controlled-modules."""

from typing import Any, Optional


class ControlledModulesError(Exception):
    """Base exception for controlled-modules."""

    pass


class ConfigError(ControlledModulesError):
    """Raised for configuration errors."""

    pass


class SimplicialError(ControlledModulesError):
    """Raised for invalid simplicial data or non-simplicial maps."""

    def __init__(self, message: str, face: Optional[int] = None):
        self.face = face
        super().__init__(message)


class RingError(ControlledModulesError):
    """Raised when ring data or a ring map is invalid."""

    pass


class ModuleError(ControlledModulesError):
    """Base class for cellular module errors."""

    pass


class AttachError(ModuleError):
    """Raised when attaching data fails face compatibility."""

    def __init__(self, message: str, face: int = -1):
        self.face = face
        super().__init__(f"{message} (face {face})")


class WellDefinednessError(ModuleError):
    """Raised when a module map does not commute with faces."""

    def __init__(self, cell: Any, face: int):
        self.cell = cell
        self.face = face
        super().__init__(f"Map not well-defined at cell {cell!r}, face {face}")


class CellularInclusionError(ModuleError):
    """Raised when a map is required to be a cellular inclusion but is not."""

    def __init__(self, cell: Any, reason: str = ""):
        self.cell = cell
        self.reason = reason
        super().__init__(f"Not a cellular inclusion at cell {cell!r}: {reason}")


class SubmoduleError(ModuleError):
    """Raised when a cell set is not a cellular submodule."""

    def __init__(self, cell: Any):
        self.cell = cell
        super().__init__(f"Cell set not closed under attaching data: {cell!r}")


class ControlError(ControlledModulesError):
    """Base class for control errors."""

    pass


class ControlViolation(ControlError):
    """Raised when a module or map violates a control condition."""

    def __init__(self, cell: Any, other: Any, distance: Any = None):
        self.cell = cell
        self.other = other
        self.distance = distance
        super().__init__(
            f"Control violated between {cell!r} and {other!r} (distance {distance})"
        )


class MixedSpacesError(ControlError):
    """Raised when conditions from different control spaces are combined."""

    pass


class CertificateSoundnessError(ControlError):
    """Raised when a predicted certificate fails its re-check.

    This always indicates an internal bug, never bad input.
    """

    def __init__(self, operation: str, cause: Exception):
        self.operation = operation
        self.cause = cause
        super().__init__(f"Soundness failure in {operation}: {cause}")


class HomotopyError(ControlledModulesError):
    """Base class for homotopy construction errors."""

    pass


class OverlapError(HomotopyError):
    """Raised when partial maps disagree where they overlap."""

    def __init__(self, cell: Any, message: str = "inputs disagree"):
        self.cell = cell
        super().__init__(f"{message} at cell {cell!r}")


class SquareError(HomotopyError):
    """Raised when a lifting square does not commute."""

    def __init__(self, cell: Any):
        self.cell = cell
        super().__init__(f"Square does not commute at cell {cell!r}")


class WitnessError(HomotopyError):
    """Raised when an equivalence or deformation witness fails verification."""

    def __init__(self, equation: str, cell: Any = None):
        self.equation = equation
        self.cell = cell
        suffix = f" at cell {cell!r}" if cell is not None else ""
        super().__init__(f"Witness equation fails: {equation}{suffix}")


class StageError(HomotopyError):
    """Raised when a named stage of a multi-step construction fails."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"Stage '{stage}' failed: {cause}")


class TelescopeError(ControlledModulesError):
    """Base class for interval and telescope errors."""

    pass


class IntervalError(TelescopeError):
    """Raised for mismatched interval bookkeeping."""

    pass


class TruncationError(TelescopeError):
    """Raised when the truncation bound is too small for a construction."""

    def __init__(self, required: int, given: int):
        self.required = required
        self.given = given
        super().__init__(
            f"Truncation bound {given} too small; resize to at least {required}"
        )


class K0Error(ControlledModulesError):
    """Base class for K-theory presentation errors."""

    pass


class ComplementError(K0Error):
    """Raised when a declared cofinal object has no complement."""

    def __init__(self, obj: Any):
        self.obj = obj
        super().__init__(f"No complement found for object {obj!r}")


class WorkbenchError(ControlledModulesError):
    """Raised for scenario execution and report errors."""

    pass


class SchemaError(WorkbenchError):
    """Raised when an input document violates the schema."""

    def __init__(self, diagnostics: list[tuple[str, str]], path: str = ""):
        self.diagnostics = diagnostics
        self.path = path
        first = diagnostics[0] if diagnostics else ("", "invalid document")
        super().__init__(
            f"{len(diagnostics)} schema violation(s); first at '{first[0]}': {first[1]}"
        )


class UnresolvedReferenceError(WorkbenchError):
    """Raised when a scenario step references an unknown name."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unresolved reference: {name}")


class AssertionFailure(WorkbenchError):
    """Raised when a scenario assertion does not hold."""

    def __init__(self, step: str, message: str):
        self.step = step
        super().__init__(f"Assertion failed in step '{step}': {message}")
