"""Exception types shared across the package."""


class ConvergenceError(ArithmeticError):
    """A series or iteration did not reach its tolerance within the budget."""


class RangeError(ArithmeticError):
    """The argument lies outside the range where a method is numerically reliable."""


class SimulationBudgetError(RuntimeError):
    """A simulation grew past its configured size cap."""


class PreconditionError(ValueError):
    """Inputs violate a documented precondition of a solver or classifier."""


class IndexEstimationError(ArithmeticError):
    """The slope table never changes sign, so no variation index can be read off.

    The fitted slopes are attached so callers can report them.
    """

    def __init__(self, message, p_grid=None, slopes=None):
        super().__init__(message)
        self.p_grid = p_grid
        self.slopes = slopes
