"""Exception types raised by horogauss."""


class HorogaussError(Exception):
    """Base class for all library errors."""


class DimensionError(HorogaussError, ValueError):
    """Operands have incompatible dimensions."""


class QuadricError(HorogaussError, ValueError):
    """A point does not lie on the expected hyperquadric."""


class SingularityError(HorogaussError, ArithmeticError):
    """A formula was evaluated at one of its poles (kappa = -1, focal time...)."""


class DegenerateJetError(HorogaussError):
    """The tangent frame of a chart is (numerically) degenerate."""


class StencilError(HorogaussError, ValueError):
    """A grid is too small for the finite-difference stencil it needs."""


class NewtonDivergence(HorogaussError):
    """Newton iteration failed to reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
