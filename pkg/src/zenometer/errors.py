"""Exception and warning types shared across the package."""


class ContractViolation(ValueError):
    """Raised when an input breaks a documented precondition (shape, hermiticity, norm)."""


class NumericalDiagnostic(RuntimeError):
    """Raised when a numerical stage cannot meet its accuracy contract.

    The message always says what to change (grid range, resolution, ...).
    """


class DegenerateSpectrumError(NumericalDiagnostic):
    """The ergodic-limit prediction assumes a non-degenerate Hamiltonian spectrum."""


class ResourceGuardError(RuntimeError):
    """Explicit refusal of a brute-force computation that would be too large."""


class GridWarning(UserWarning):
    """Recoverable grid-quality diagnostic (truncation or aliasing suspected)."""
