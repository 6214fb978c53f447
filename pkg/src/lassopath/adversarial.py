"""Worst-case instances with (3^p + 1) / 2 path segments.

Starting from ``y = [1], X = [1]`` each level appends one observation and
one variable::

    y' = [y; y_next]        X' = [[X, 2 alpha y], [0, alpha y_next]]

with ``0 < alpha < lam_1 / (2 y^T y + y_next^2)`` and ``lam_1`` the last
kink of the current path. Every level turns a k-segment path into a
(3k - 1)-segment one, and after p - 1 levels X is upper triangular with
diagonal ``alpha_j`` and ``2 alpha_j`` above it in column j.
"""

import logging

import numpy as np

from .exceptions import InvalidPath, InvalidSequence, PrecisionExhausted, TruncatedPath
from .homotopy import HomotopyOptions, compute_exact_path
from .model import ProblemInstance

__all__ = [
    "expected_pattern_sequence",
    "extend_instance",
    "gen_pathological",
    "pathological_path",
    "worst_case_segments",
]

log = logging.getLogger(__name__)


def worst_case_segments(p):
    return (3**p + 1) // 2


def _check_alpha_factor(alpha_factor):
    if not 0 < alpha_factor < 1:
        raise ValueError(f"alpha_factor must lie strictly between 0 and 1, got {alpha_factor}")


def extend_instance(inst, exact_path, y_next=1.0, alpha_factor=0.5):
    """Append the adversarial variable to ``inst`` given its full exact path."""
    _check_alpha_factor(alpha_factor)
    if y_next == 0:
        raise ValueError("y_next must be nonzero")
    if exact_path.kind != "exact" or not exact_path.terminal:
        raise InvalidPath("need the complete (untruncated) exact path of the instance")
    if exact_path.p != inst.p:
        raise InvalidPath("path does not belong to this instance")
    if not _in_span(inst):
        raise ValueError("y must lie in the column span of X")
    lam1 = float(exact_path.last_kink_lambda)
    y = inst.y
    alpha = alpha_factor * lam1 / (2 * (y @ y) + y_next**2)
    n, p = inst.X.shape
    X = np.zeros((n + 1, p + 1))
    X[:n, :p] = inst.X
    X[:n, p] = 2 * alpha * y
    X[n, p] = alpha * y_next
    return ProblemInstance(np.append(y, y_next), X)


def _in_span(inst):
    X = inst.X
    n, p = X.shape
    # square upper-triangular with nonzero diagonal: full rank by structure
    if n == p and not np.any(np.tril(X, -1)) and np.all(np.diag(X) != 0):
        return True
    coef, *_ = np.linalg.lstsq(X, inst.y, rcond=None)
    return np.linalg.norm(inst.y - X @ coef) <= 1e-8 * np.linalg.norm(inst.y)


def gen_pathological(p, alpha_factor=0.5, precision=None, y_next=1.0, event_tol=None):
    """Build the p-variable worst-case instance by repeated extension.

    The exact path is recomputed at every level to read off its last kink;
    a level whose path does not have exactly (3^q + 1) / 2 segments, or whose
    path truncates, raises :class:`PrecisionExhausted`. ``precision`` and
    ``event_tol`` are passed to the path computations; beyond p = 9 the kinks
    crowd below the default event tolerance and both need raising/lowering
    (128 bits with ``event_tol=1e-25`` reaches p = 11).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    _check_alpha_factor(alpha_factor)
    inst = ProblemInstance(np.array([1.0]), np.array([[1.0]]))
    opts = _options(precision, event_tol)
    for q in range(1, p):
        path = _checked_path(inst, q, opts)
        inst = extend_instance(inst, path, y_next, alpha_factor)
        log.debug("level %d: alpha=%.6g", q + 1, inst.X[q, q])
    return inst


def _options(precision, event_tol):
    if event_tol is None:
        return HomotopyOptions(precision=precision)
    return HomotopyOptions(precision=precision, event_tol=event_tol)


def _checked_path(inst, q, opts):
    expected = worst_case_segments(q)
    try:
        path = compute_exact_path(inst, opts)
    except TruncatedPath as exc:
        raise PrecisionExhausted(q - 1, q, expected, len(exc.path.kinks), exc.reason) from exc
    if len(path.kinks) != expected:
        raise PrecisionExhausted(q - 1, q, expected, len(path.kinks))
    return path


def pathological_path(p, alpha_factor=0.5, precision=None, event_tol=None):
    """Instance and exact path for dimension p, with every count verified."""
    inst = gen_pathological(p, alpha_factor, precision, event_tol=event_tol)
    path = _checked_path(inst, p, _options(precision, event_tol))
    return inst, path


def expected_pattern_sequence(old_patterns):
    """Predicted sign patterns after one extension.

    For a path with patterns ``eta^1 = 0, ..., eta^k`` the extended path
    visits ``[eta^i; 0]`` for i = 1..k, then ``[eta^i; 1]`` for i = k..1, then
    ``[-eta^i; 1]`` for i = 2..k.
    """
    old = [tuple(int(v) for v in eta) for eta in old_patterns]
    if not old or any(old[0]):
        raise InvalidSequence("the first pattern must be the zero pattern")
    first = [eta + (0,) for eta in old]
    middle = [eta + (1,) for eta in reversed(old)]
    last = [tuple(-v for v in eta) + (1,) for eta in old[1:]]
    return first + middle + last
