"""Exception hierarchy.

Everything raised on purpose derives from :class:`TrotterKatoError`.
:class:`ValidationError` subclasses mean "the input is not admissible" and map
to CLI exit code 1; I/O problems surface as plain :class:`OSError` (exit 2).
"""


class TrotterKatoError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TrotterKatoError):
    """Input data violates a documented precondition."""


# spectral core
class NotHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class EigensolverFailure(TrotterKatoError):
    pass


class FunctionUndefinedAtSpectrum(ValidationError):
    """A scalar function could not be evaluated at some eigenvalue."""

    def __init__(self, eigenvalue, reason="", scheme=None):
        self.eigenvalue = eigenvalue
        self.scheme = scheme
        msg = f"function undefined at eigenvalue {eigenvalue!r}"
        if scheme is not None:
            msg += f" (scheme {scheme})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class SingularResolvent(ValidationError):
    pass


# kato functions
class KappaExceedsOne(ValidationError):
    pass


class PoleAtBoundary(ValidationError):
    def __init__(self, z, msg=None):
        self.z = z
        super().__init__(msg or f"pole on the imaginary axis at z = {z!r}")


class BoundaryACUnsupported(ValidationError):
    pass


class BetaDiverges(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    pass


# product formulas
class DimMismatch(ValidationError):
    pass


class BadProjection(ValidationError):
    pass


class MissingProjection(ValidationError):
    pass


class SchemeMismatch(ValidationError):
    pass


class SingularInverse(TrotterKatoError):
    pass


# harness
class PotentialSingularOnGrid(ValidationError):
    pass


class ConfigParse(ValidationError):
    def __init__(self, msg, field=None):
        self.field = field
        super().__init__(f"{field}: {msg}" if field else msg)


class SchemeRejected(ValidationError):
    def __init__(self, msg, axiom=None):
        self.axiom = axiom
        super().__init__(msg)
