"""Exception types shared across the package."""


class IonSynthError(Exception):
    """Base class for all package errors."""


class DimensionError(IonSynthError, ValueError):
    """An index or an array shape is outside the declared space."""


class ContractError(IonSynthError, ValueError):
    """An input violates a documented precondition (norm, shape, pairing)."""


class DegenerateInputError(IonSynthError, ValueError):
    """Both amplitudes handed to a zeroing solve are zero."""


class DegenerateTargetError(IonSynthError, ValueError):
    """The target matrix has a zero column and cannot be compiled."""


class MatrixFormatError(IonSynthError, ValueError):
    """A matrix or schedule file does not match the documented layout."""


class InternalError(IonSynthError, RuntimeError):
    """A self-check inside the compiler failed; indicates a bug, not bad input."""
