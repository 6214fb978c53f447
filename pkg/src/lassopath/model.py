"""Problem data, path containers and the optimality/duality toolkit.

The Lasso objective is ``f(w) = 0.5 ||y - X w||^2 + lam ||w||_1`` with dual
``g(kappa) = -0.5 kappa^T kappa - kappa^T y`` over ``||X^T kappa||_inf <= lam``.
All functions accept float64 arrays, and also mpfr object arrays produced by
the extended-precision solvers.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._numeric import signs, to_float
from .exceptions import DimensionError, InfeasibleDual, InvalidEpsilon, InvalidInstance

ZERO_TOL = 1e-10
DUAL_FEAS_TOL = 1e-10

__all__ = [
    "Certificate",
    "Kink",
    "OptimalityReport",
    "ProblemInstance",
    "RegularizationPath",
    "check_exact_optimality",
    "check_opt_condition",
    "correlations",
    "dual_from_primal",
    "dual_objective",
    "duality_gap",
    "gap_bound_factor",
    "objective",
    "sign_pattern",
]


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Response ``y`` (length n) and design ``X`` (n x p)."""

    y: np.ndarray
    X: np.ndarray
    column_norms_sq: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        y = np.array(self.y, dtype=np.float64)
        X = np.array(self.X, dtype=np.float64)
        if y.ndim != 1:
            raise InvalidInstance("y must be a vector")
        if X.ndim == 1 and y.size == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2:
            raise InvalidInstance("X must be a matrix")
        if X.shape[0] != y.size:
            raise InvalidInstance(f"X has {X.shape[0]} rows but y has length {y.size}")
        if y.size < 1 or X.shape[1] < 1:
            raise InvalidInstance("need n >= 1 and p >= 1")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidInstance("data must be finite")
        norms = np.einsum("ij,ij->j", X, X)
        if np.any(norms == 0):
            raise InvalidInstance(f"zero columns: {np.flatnonzero(norms == 0).tolist()}")
        X = np.asfortranarray(X)
        for a in (y, X, norms):
            a.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "column_norms_sq", norms)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def lambda_max(self):
        """``||X^T y||_inf``: the zero vector is optimal for every lam above it."""
        return float(np.max(np.abs(self.X.T @ self.y)))


@dataclass(frozen=True, eq=False)
class Kink:
    """One recorded point of a path.

    ``coeffs`` are the solution values at ``lam``. ``pattern`` is the sign
    pattern of the piece of path that ends at ``lam`` coming from above (for
    the first kink, the zero pattern valid for all lam >= lambda_max), so a
    path with k kinks has k segments. A coordinate leaving the active set is
    exactly zero at its kink while the pattern still carries its sign.

    ``step`` is ``"start"``, ``"homotopy"`` (reached along a linear piece),
    ``"first_order"`` (re-solved after a multiplicative jump), ``"sample"``
    (an exact solution on a sampling grid) or ``"end"``.
    ``valid_until`` is the lower end of the interval on which ``coeffs`` may
    be held constant (approximate paths only).
    """

    lam: object
    coeffs: np.ndarray
    active: tuple
    pattern: tuple
    step: str = "homotopy"
    valid_until: Optional[object] = None


@dataclass(frozen=True, eq=False)
class RegularizationPath:
    kinks: tuple
    kind: str
    epsilon: Optional[float] = None
    lambda_max: float = 0.0
    p: int = 0
    precision: Optional[int] = None
    terminal: bool = True

    def __post_init__(self):
        if self.kind not in ("exact", "approx"):
            raise ValueError(f"unknown path kind {self.kind!r}")

    def __len__(self):
        return len(self.kinks)

    @property
    def lambdas(self):
        return np.array([float(k.lam) for k in self.kinks])

    @property
    def patterns(self):
        return [k.pattern for k in self.kinks]

    @property
    def coefficients(self):
        """Kink coefficients as a (num_kinks, p) float64 array."""
        return np.array([to_float(k.coeffs) for k in self.kinks])

    @property
    def last_kink_lambda(self):
        """Smallest lambda at which the path actually bends.

        The final record of a completed exact path is a point on the last
        (unbounded) segment rather than a breakpoint, so it is skipped.
        """
        if self.terminal and len(self.kinks) >= 2:
            return self.kinks[-2].lam
        return self.kinks[-1].lam


@dataclass(frozen=True, eq=False)
class Certificate:
    w: np.ndarray
    kappa: np.ndarray
    lam: float
    primal: float
    dual: float
    gap: float
    relative_gap: float


@dataclass(frozen=True)
class OptimalityReport:
    """Outcome of an optimality test.

    ``active_violation`` is the worst breach among nonzero coordinates,
    ``inactive_violation`` among zero coordinates; both are 0 when satisfied
    with room to spare.
    """

    passed: bool
    active_violation: float
    inactive_violation: float
    worst_index: Optional[int] = None

    def __bool__(self):
        return self.passed


def _check_w(inst, w):
    w = np.asarray(w)
    if w.shape != (inst.p,):
        raise DimensionError(f"expected coefficient vector of length {inst.p}, got shape {w.shape}")
    return w


def _check_kappa(inst, kappa):
    kappa = np.asarray(kappa)
    if kappa.shape != (inst.n,):
        raise DimensionError(f"expected dual vector of length {inst.n}, got shape {kappa.shape}")
    return kappa


def _check_eps(epsilon1, epsilon2):
    if epsilon1 < 0 or epsilon2 < -epsilon1:
        raise InvalidEpsilon(f"need eps1 >= 0 and eps2 >= -eps1, got ({epsilon1}, {epsilon2})")


def correlations(inst, w, X=None, y=None):
    """``X^T (y - X w)``; pass working-precision ``X``/``y`` to avoid rounding."""
    X = inst.X if X is None else X
    y = inst.y if y is None else y
    return X.T @ (y - X @ w)


def objective(inst, w, lam, X=None, y=None):
    w = _check_w(inst, w)
    X = inst.X if X is None else X
    y = inst.y if y is None else y
    r = y - X @ w
    return 0.5 * (r @ r) + lam * np.sum(np.abs(w))


def dual_objective(inst, kappa, lam, X=None, y=None):
    """Return ``(g(kappa), feasible)``; feasibility allows 1e-10 relative slack."""
    kappa = _check_kappa(inst, kappa)
    X = inst.X if X is None else X
    y = inst.y if y is None else y
    value = -0.5 * (kappa @ kappa) - kappa @ y
    dual_norm = np.max(np.abs(X.T @ kappa))
    return value, bool(dual_norm <= lam * (1 + DUAL_FEAS_TOL))


def dual_from_primal(inst, w, epsilon1=0.0, X=None, y=None):
    """Scaled residual ``(X w - y) / (1 + eps1)``.

    Feasible for the dual whenever ``w`` satisfies OPT(eps1, .) at the lambda
    of interest; no feasibility is promised otherwise.
    """
    w = _check_w(inst, w)
    if epsilon1 < 0:
        raise InvalidEpsilon("eps1 must be nonnegative")
    X = inst.X if X is None else X
    y = inst.y if y is None else y
    return (X @ w - y) / (1 + epsilon1)


def duality_gap(inst, w, kappa, lam, X=None, y=None):
    w = _check_w(inst, w)
    kappa = _check_kappa(inst, kappa)
    X = inst.X if X is None else X
    y = inst.y if y is None else y
    dual_norm = np.max(np.abs(X.T @ kappa))
    if dual_norm > lam * (1 + DUAL_FEAS_TOL):
        raise InfeasibleDual(dual_norm, lam)
    f = objective(inst, w, lam, X, y)
    g, _ = dual_objective(inst, kappa, lam, X, y)
    gap = f - g
    rel = gap / f if f > 0 else 0 * gap
    return Certificate(
        w=w, kappa=kappa, lam=lam, primal=f, dual=g, gap=gap, relative_gap=rel
    )


def check_exact_optimality(inst, w, lam, tol=0.0, X=None, y=None):
    """Subgradient conditions: equality on the support, ``|c_j| <= lam`` off it."""
    w = _check_w(inst, w)
    c = correlations(inst, w, X, y)
    s = signs(w)
    nz = s != 0
    act = np.abs(c - lam * s)
    inact = np.abs(c) - lam
    return _report(act, inact, nz, tol)


def check_opt_condition(inst, w, lam, epsilon1, epsilon2, X=None, y=None):
    """The perturbed conditions OPT_lam(eps1, eps2).

    Nonzero ``w_j`` need ``lam(1-eps2) <= c_j sign(w_j) <= lam(1+eps1)``;
    zero ones need ``|c_j| <= lam(1+eps1)`` where ``c = X^T(y - X w)``.
    """
    _check_eps(epsilon1, epsilon2)
    w = _check_w(inst, w)
    c = correlations(inst, w, X, y)
    s = signs(w)
    nz = s != 0
    cs = c * s
    lo = lam * (1 - epsilon2) - cs
    hi = cs - lam * (1 + epsilon1)
    act = np.where(lo > hi, lo, hi)
    inact = np.abs(c) - lam * (1 + epsilon1)
    return _report(act, inact, nz, 0.0)


def _report(act, inact, nz, tol):
    act_v = max((float(v) for v in act[nz]), default=0.0)
    inact_v = max((float(v) for v in inact[~nz]), default=0.0)
    act_v = max(act_v, 0.0)
    inact_v = max(inact_v, 0.0)
    worst = None
    if act_v > tol or inact_v > tol:
        score = np.where(nz, act, inact)
        worst = int(np.argmax(to_float(score)))
    passed = act_v <= tol and inact_v <= tol
    return OptimalityReport(passed, act_v, inact_v, worst)


def gap_bound_factor(epsilon1, epsilon2):
    """Relative duality gap guaranteed by OPT(eps1, eps2)."""
    _check_eps(epsilon1, epsilon2)
    return max(epsilon1**2 / (1 + epsilon1) ** 2, (epsilon1 + epsilon2) / (1 + epsilon1))


def sign_pattern(w, zero_tol=ZERO_TOL):
    """Sign of each entry as a tuple, entries with ``|w_j| <= zero_tol`` -> 0."""
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    w = np.asarray(w)
    s = signs(w)
    s[np.abs(w) <= zero_tol] = 0
    return tuple(int(v) for v in s)
