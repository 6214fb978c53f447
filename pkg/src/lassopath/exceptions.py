"""Exception and warning types raised across the package."""


class LassoPathError(Exception):
    """Base class for errors raised by lassopath."""


class DimensionError(LassoPathError, ValueError):
    pass


class InvalidInstance(LassoPathError, ValueError):
    pass


class InvalidEpsilon(LassoPathError, ValueError):
    pass


class InfeasibleDual(LassoPathError):
    def __init__(self, dual_norm, lam):
        super().__init__(
            f"dual point infeasible: ||X^T kappa||_inf = {float(dual_norm):.17g} > lambda = {float(lam):.17g}"
        )
        self.dual_norm = dual_norm
        self.lam = lam


class SingularError(LassoPathError):
    """The active-set Gram matrix is singular or too ill-conditioned."""

    def __init__(self, active, condition_estimate):
        super().__init__(
            f"Gram matrix of active set {list(active)} is singular "
            f"(condition estimate {condition_estimate:.3g})"
        )
        self.active = tuple(active)
        self.condition_estimate = condition_estimate


class TruncatedPath(LassoPathError):
    """Path following stopped early; ``path`` holds the valid part."""

    def __init__(self, reason, path, message=""):
        super().__init__(message or f"path truncated ({reason}) after {len(path.kinks)} kinks")
        self.reason = reason
        self.path = path


class OutOfRange(LassoPathError, ValueError):
    pass


class MaxSweepsExceeded(LassoPathError):
    """Coordinate descent hit its sweep budget; ``w`` is the last iterate."""

    def __init__(self, w, report, sweeps, lam=None):
        super().__init__(
            f"coordinate descent did not meet its stopping test after {sweeps} sweeps"
            + (f" at lambda={float(lam):.6g}" if lam is not None else "")
        )
        self.w = w
        self.report = report
        self.sweeps = sweeps
        self.lam = lam


class MaxKinksExceeded(LassoPathError):
    def __init__(self, path, limit):
        super().__init__(f"approximate path exceeded {limit} recorded pairs")
        self.path = path
        self.limit = limit


class InvalidPath(LassoPathError, ValueError):
    pass


class InvalidSequence(LassoPathError, ValueError):
    pass


class PrecisionExhausted(LassoPathError):
    """Worst-case construction lost exactness at dimension ``failed_p``."""

    def __init__(self, achieved_p, failed_p, expected, observed, detail=""):
        msg = (
            f"precision exhausted at p={failed_p}: expected {expected} segments, "
            f"observed {observed}; largest exact p = {achieved_p}"
        )
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.achieved_p = achieved_p
        self.failed_p = failed_p
        self.expected = expected
        self.observed = observed


class ParseError(LassoPathError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class DegenerateColumn(LassoPathError, ValueError):
    def __init__(self, column):
        super().__init__(f"column {column} is constant and cannot be normalized")
        self.column = column


class SimultaneousEventsWarning(UserWarning):
    """Two or more path events fell within the event tolerance of each other."""
