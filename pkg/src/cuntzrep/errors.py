"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented invariant (bad spec, malformed word, ...)."""


class ResolutionError(ValueError):
    """A word or depth is too short to resolve the requested operation."""


class NotAbsolutelyContinuousError(ValueError):
    """A measure has mass on a cylinder where the reference measure has none.

    Carries the offending cylinder as a digit string in ``witness``.
    """

    def __init__(self, witness: str, message: str | None = None):
        self.witness = witness
        super().__init__(message or f"not absolutely continuous: witness cylinder C({witness!r})")


class CertificateError(ValueError):
    """A supplied equivalence certificate is unusable (e.g. vanishes on positive mass)."""


class MethodDisagreementError(RuntimeError):
    """Two independent computations of the same quantity disagree."""
