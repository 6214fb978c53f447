"""Independent checks of computed paths.

``verify_path`` certifies a path by duality gaps at sampled lambdas,
``count_segments`` and ``check_structural_bounds`` test the combinatorial
bounds on sign patterns, and ``grid_oracle`` solves the problem from scratch
on a grid of lambdas with coordinate descent, for comparison with the
homotopy output.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._numeric import Workspace
from .approx import evaluate_path
from .cd import cd_solve_grid
from .model import duality_gap, sign_pattern

__all__ = [
    "GridPoint",
    "VerificationReport",
    "check_structural_bounds",
    "count_segments",
    "grid_oracle",
    "oracle_patterns",
    "sample_lambdas",
    "verify_path",
]

log = logging.getLogger(__name__)

EXACT_TARGET = 1e-7
REPORT_SLACK = 1e-12


@dataclass(frozen=True)
class VerificationReport:
    samples_checked: int
    max_relative_gap: float
    epsilon_target: float
    passed: bool
    pattern_count: int
    upper_bound_ok: bool
    antipodal_free: bool
    worst_lambda: Optional[float] = None

    def __bool__(self):
        return self.passed

    def to_dict(self):
        return {
            "samples_checked": self.samples_checked,
            "max_relative_gap": self.max_relative_gap,
            "epsilon_target": self.epsilon_target,
            "pass": self.passed,
            "pattern_count": self.pattern_count,
            "upper_bound_ok": self.upper_bound_ok,
            "antipodal_free": self.antipodal_free,
            "worst_lambda": self.worst_lambda,
        }


def sample_lambdas(path, num_samples):
    """Geometric grid from the first to the last recorded lambda."""
    hi = float(path.kinks[0].lam)
    lo = float(path.kinks[-1].lam)
    if num_samples < 2:
        raise ValueError("num_samples must be >= 2")
    if lo >= hi:
        return np.array([hi])
    lams = np.geomspace(hi, lo, num_samples)
    # keep the ends exactly on the records despite rounding in geomspace
    lams[0], lams[-1] = hi, lo
    return lams


def certificate_at(ws, w, lam):
    """Duality-gap certificate for ``w`` at ``lam`` from its scaled residual.

    The dual point is ``kappa = t (X w - y)`` with the scale ``t`` that
    maximizes the dual objective subject to feasibility.
    """
    X, y = ws.X, ws.y
    r = X @ w - y
    c_norm = np.max(np.abs(X.T @ r))
    rr = r @ r
    if rr == 0:
        kappa = 0 * r
    else:
        t = -(r @ y) / rr
        if t < 0:
            t = 0 * t
        if c_norm > 0 and t * c_norm > lam:
            t = lam / c_norm
        kappa = t * r
    return duality_gap(ws.inst, w, kappa, lam, X, y)


def verify_path(inst, path, epsilon=None, num_samples=100):
    """Check that the path's solutions are ``epsilon``-approximate.

    ``epsilon`` defaults to the path's own epsilon (``1e-7`` for exact
    paths). Sampled lambdas are geometric over the recorded range; the path
    is evaluated by :func:`~lassopath.approx.evaluate_path` in its own
    precision.
    """
    if epsilon is None:
        epsilon = path.epsilon if path.kind == "approx" and path.epsilon else EXACT_TARGET
    lams = sample_lambdas(path, num_samples)
    ws = Workspace(inst, path.precision)
    worst, worst_lam = -np.inf, None
    with ws.context():
        for lam in lams:
            lam_w = ws.scalar(lam)
            w = evaluate_path(path, lam_w)
            rel = float(certificate_at(ws, w, lam_w).relative_gap)
            if rel > worst:
                worst, worst_lam = rel, float(lam)
    upper_ok, antipodal_ok = check_structural_bounds(path)
    return VerificationReport(
        samples_checked=len(lams),
        max_relative_gap=worst,
        epsilon_target=epsilon,
        passed=bool(worst <= epsilon + REPORT_SLACK),
        pattern_count=count_segments(path),
        upper_bound_ok=upper_ok,
        antipodal_free=antipodal_ok,
        worst_lambda=worst_lam,
    )


def _patterns(path_or_patterns):
    if hasattr(path_or_patterns, "kinks"):
        return [tuple(k.pattern) for k in path_or_patterns.kinks]
    return [tuple(int(v) for v in eta) for eta in path_or_patterns]


def count_segments(path):
    """Number of linear pieces: one per record on approximate paths.

    For exact paths and plain pattern lists this is the number of runs of
    identical consecutive sign patterns, which equals the number of kinks.
    Approximate paths can repeat a pattern across a first-order jump, so
    every record counts there.
    """
    if getattr(path, "kind", None) == "approx":
        return len(path.kinks)
    pats = _patterns(path)
    return sum(1 for i, eta in enumerate(pats) if i == 0 or eta != pats[i - 1])


def check_structural_bounds(path):
    """``(count <= (3^p + 1) / 2, no nonzero pattern next to its negation)``.

    Accepts a path or a plain list of sign patterns.
    """
    pats = _patterns(path)
    if not pats:
        return True, True
    p = path.p if hasattr(path, "kinks") else len(pats[0])
    upper_ok = count_segments(pats) <= (3**p + 1) // 2
    seen = {eta for eta in pats if any(eta)}
    antipodal_ok = not any(tuple(-v for v in eta) in seen for eta in seen)
    return upper_ok, antipodal_ok


@dataclass(frozen=True)
class GridPoint:
    lam: float
    w: np.ndarray
    pattern: tuple


def grid_oracle(inst, lambda_grid, tol=1e-12, max_sweeps=10**6):
    """Cold-start coordinate descent at every grid lambda, OPT(tol, tol).

    Points whose solve does not converge within ``max_sweeps`` are skipped
    with a warning. Returns a list of :class:`GridPoint` in grid order.
    """
    if tol > 1e-10:
        raise ValueError("grid oracle tolerance must be <= 1e-10")
    lams = np.asarray(lambda_grid, dtype=np.float64)
    W, ok = cd_solve_grid(inst, lams, tol, max_sweeps)
    if not ok.all():
        bad = lams[~ok]
        warnings.warn(
            f"grid oracle: {bad.size} of {lams.size} points did not converge; skipped",
            RuntimeWarning,
            stacklevel=2,
        )
        log.info("unconverged lambdas: %s", bad.tolist())
    return [
        GridPoint(float(lam), W[i].copy(), sign_pattern(W[i], 0.0))
        for i, lam in enumerate(lams)
        if ok[i]
    ]


def oracle_patterns(points):
    """Sequence of distinct consecutive patterns seen along a grid."""
    seq = []
    for pt in points:
        if not seq or seq[-1] != pt.pattern:
            seq.append(pt.pattern)
    return seq
