"""Exception hierarchy; the CLI maps each branch to an exit status."""


class TwoPointError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(TwoPointError, ValueError):
    """Input does not match a published JSON schema or a type invariant."""


class DimensionError(SchemaError):
    """Dimension not admissible for the requested space family."""


class UnsupportedError(TwoPointError):
    """Base for requests outside what the library can decide or model."""


class UnsupportedFamilyError(UnsupportedError):
    """No point model for this space family (the Cayley plane)."""


class UnsupportedRegimeError(UnsupportedError):
    """No classification theorem covers this pair of space families."""


class NumericalError(TwoPointError, ArithmeticError):
    """Base for numerical failures."""


class DomainError(NumericalError, ValueError):
    """Argument outside the domain where a series converges."""


class NonConvergenceError(NumericalError):
    """A series or iteration did not meet its tolerance within its cap."""


class QuadratureError(NumericalError):
    """Quadrature failed to stabilise after the allowed order doublings."""


class EigenSolverError(NonConvergenceError):
    """Jacobi rotations did not converge within the sweep cap."""


class SamplingError(NumericalError):
    """Rejection sampling exceeded its retry cap."""
