"""Exception types shared by the solvers and the benchmark harness."""


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class DefinitenessError(ArithmeticError):
    """A matrix that must be positive definite is not (factorization failed)."""


class EmptyComponentError(RuntimeError):
    """A mixture component received (numerically) zero total weight."""


class AssignmentError(ValueError):
    """A cluster indicator row cannot be assigned to any node."""


class InvalidNodeCountError(ValueError):
    """Requested node count is incompatible with the number of variables."""


class NumericalError(RuntimeError):
    """An update produced non-finite values; carries the offending iterate.

    The ``iterate`` attribute holds a dict of the arrays involved so the
    failure can be inspected post mortem.
    """

    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = dict(iterate) if iterate else {}


class PipelineError(RuntimeError):
    """A pipeline stage (k-means split) produced an unusable state subset."""


class GenerationError(ValueError):
    """Synthetic ground-truth generation is infeasible for the parameters."""


class UndefinedAccuracyError(ValueError):
    """Edge accuracy is undefined because the ground truth has no edges."""


class ParseError(ValueError):
    """A matrix file could not be parsed; message carries the location."""


class FitError(RuntimeError):
    """A mixture fit failed beyond recovery (repeated component collapse)."""
