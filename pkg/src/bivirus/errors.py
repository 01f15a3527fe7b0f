"""Exception hierarchy for the bivirus toolkit."""


class BivirusError(Exception):
    """Base class for all package errors."""


class PreconditionError(BivirusError, ValueError):
    """An operation was called with input violating its contract."""


class ModelFormatError(BivirusError, ValueError):
    """A model file or dict does not match the expected schema."""


class EigenSolverError(BivirusError):
    """The dense eigensolver failed to converge; carries the matrix."""

    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class DegeneracyError(BivirusError):
    """A dominant eigenvalue is not numerically simple."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class NonConvergenceError(BivirusError):
    """An iterative solver hit its iteration cap; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class AssumptionError(BivirusError):
    """The model violates a standing assumption; carries the report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateEquilibrium(BivirusError):
    """An equilibrium has an eigenvalue too close to the imaginary axis.

    Hyperbolicity holds for generic parameters, so hitting this means the
    model sits on (or numerically near) a measure-zero parameter set that
    the counting laws do not cover. Carries the offending spectrum.
    """

    def __init__(self, message, spectrum=None, state=None):
        super().__init__(message)
        self.spectrum = spectrum
        self.state = state


class IntegrationError(BivirusError):
    """The integrator left the invariant region beyond the guard tolerance."""


class StiffnessError(BivirusError):
    """The adaptive integrator underflowed its step size or step budget."""
