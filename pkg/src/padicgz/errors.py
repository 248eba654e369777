"""Error classes shared across the package.

Every loud failure path raises one of these, so callers (and the CLI) can
distinguish "your input is malformed" from "the assertion you asked me to
check is false".
"""


class PadicError(Exception):
    """Base class for all package errors."""


class PrecisionError(PadicError):
    """Requested digits exceed what the operands carry."""


class ContextMismatch(PadicError):
    """Operands belong to different prime contexts / rings."""


class NotSquareError(PadicError):
    """A quadratic context was requested for a square discriminant."""


class DepthError(PadicError):
    """A disc, cover or measure is not resolvable at the stored depth."""


class MeasureFormatError(PadicError):
    """A serialized measure table violates a named invariant."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        super().__init__(f"measure invariant violated: {invariant}"
                         + (f" ({detail})" if detail else ""))


class ModelError(PadicError):
    """A finite model (group, character, ring, class model) is inconsistent."""


class InstanceError(PadicError):
    """An instance file or instance object violates its declared contract."""


class UnsupportedError(PadicError):
    """A mathematically meaningful request outside the implemented envelope."""
