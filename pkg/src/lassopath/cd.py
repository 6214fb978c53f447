"""Cyclic coordinate descent for the Lasso with the OPT stopping test.

Each coordinate update is ``w_j <- S(x_j^T r + ||x_j||^2 w_j, lam) / ||x_j||^2``
with ``S`` the soft-threshold and ``r = y - X w`` kept up to date after every
change. The stopping test is :func:`~lassopath.model.check_opt_condition`,
evaluated on a freshly computed residual.

``polish=True`` additionally tries an active-set solve built from the
current iterate's support and signs. On small, badly conditioned problems
(the worst-case family) plain coordinate descent needs a very large number
of sweeps near lam = 0 while the polished candidate is typically accepted
immediately. Any candidate is accepted only if it passes the same OPT test.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._numeric import Workspace, signs
from .exceptions import InvalidEpsilon, MaxSweepsExceeded, SingularError
from .linalg import build_gram
from .model import check_opt_condition

__all__ = ["CdOptions", "cd_solve", "cd_solve_grid", "soft_threshold"]

log = logging.getLogger(__name__)

RESIDUAL_REFRESH = 1000


@dataclass(frozen=True)
class CdOptions:
    """Stopping test OPT(epsilon1, epsilon2) and sweep budget."""

    epsilon1: float = 1e-9
    epsilon2: float = 1e-9
    max_sweeps: int = 10**6
    check_every: int = 1
    polish: bool = False
    precision: Optional[int] = None

    def __post_init__(self):
        if self.epsilon1 < 0 or self.epsilon2 < -self.epsilon1:
            raise InvalidEpsilon(
                f"need eps1 >= 0 and eps2 >= -eps1, got ({self.epsilon1}, {self.epsilon2})"
            )
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.check_every < 1:
            raise ValueError("check_every must be >= 1")


def soft_threshold(z, t):
    """``sign(z) * max(|z| - t, 0)`` for scalars or arrays."""
    if np.any(np.asarray(t, dtype=np.float64) < 0):
        raise ValueError("threshold must be nonnegative")
    if isinstance(z, np.ndarray):
        return np.where(z > t, z - t, np.where(z < -t, z + t, 0 * z))
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0 * z


def cd_solve(inst, lam, w0=None, opts=None):
    """Solve the Lasso at ``lam`` to OPT(eps1, eps2) from the warm start ``w0``.

    Returns the coefficient vector in the working precision (float64 unless
    ``opts.precision`` is set). Raises :class:`MaxSweepsExceeded` carrying the
    last iterate and its violation report.
    """
    opts = opts or CdOptions()
    if not lam > 0:
        raise ValueError("lambda must be positive")
    ws = Workspace(inst, opts.precision)
    with ws.context():
        w = ws.zeros(inst.p) if w0 is None else ws.working(w0)
        if w.shape != (inst.p,):
            raise ValueError(f"warm start must have length {inst.p}")
        w, _ = run_cd(ws, ws.scalar(lam), w, opts)
        return w


def run_cd(ws, lam, w, opts):
    """Coordinate descent on a prepared workspace; returns ``(w, sweeps)``.

    The caller must already be inside ``ws.context()``.
    """
    e1, e2 = opts.epsilon1, opts.epsilon2
    X, y = ws.X, ws.y
    w = w.copy()
    report = check_opt_condition(ws.inst, w, lam, e1, e2, X, y)
    if report.passed:
        return w, 0
    if opts.polish:
        cand = polish(ws, lam, w, e1, e2)
        if cand is not None:
            return cand, 0
    nsq = ws.col_norms_sq
    cols = ws.cols
    r = y - X @ w
    for sweep in range(1, opts.max_sweeps + 1):
        for j in range(len(cols)):
            wj = w[j]
            z = cols[j] @ r + nsq[j] * wj
            new = soft_threshold(z, lam) / nsq[j]
            if new != wj:
                r -= cols[j] * (new - wj)
                w[j] = new
        if sweep % RESIDUAL_REFRESH == 0:
            r = y - X @ w
        if sweep % opts.check_every:
            continue
        report = check_opt_condition(ws.inst, w, lam, e1, e2, X, y)
        if report.passed:
            return w, sweep
        # attempts at sweeps 1, 2, 4, 8, ... keep the overhead logarithmic
        if opts.polish and sweep & (sweep - 1) == 0:
            cand = polish(ws, lam, w, e1, e2)
            if cand is not None:
                log.debug("polish accepted after %d sweeps at lambda=%.6g", sweep, float(lam))
                return cand, sweep
    raise MaxSweepsExceeded(w, report, opts.max_sweeps, lam)


def polish(ws, lam, w, e1, e2, max_rounds=None):
    """Active-set candidate at ``lam`` seeded by the support and signs of ``w``.

    Solves ``G_J w_J = X_J^T y - lam eta_J``, then drops coordinates whose sign
    disagrees with ``eta`` and adds violating inactive ones, for a few rounds.
    Returns a vector passing OPT(e1, e2) or ``None``.
    """
    p = ws.inst.p
    c = ws.Xty - ws.gram @ w
    s_w = signs(w)
    s_c = signs(c)
    bound = lam * (1 + e1)
    eta = {}
    for j in range(p):
        if s_w[j]:
            eta[j] = int(s_w[j])
        elif abs(c[j]) > bound:
            eta[j] = int(s_c[j])
    max_rounds = max_rounds or max(4, p)
    seen = set()
    for _ in range(max_rounds):
        key = tuple(sorted(eta.items()))
        if key in seen:
            return None
        seen.add(key)
        cand = ws.zeros(p)
        J = sorted(eta)
        if J:
            try:
                system = build_gram(ws.gram, J)
            except SingularError:
                return None
            wJ = system.solve(ws.Xty[J] - lam * ws.working([eta[j] for j in J]))
            cand[J] = wJ
        if check_opt_condition(ws.inst, cand, lam, e1, e2, ws.X, ws.y).passed:
            return cand
        c = ws.Xty - ws.gram @ cand
        s_cand = signs(cand)
        s_c = signs(c)
        eta = {j: e for j, e in eta.items() if s_cand[j] == e}
        for j in range(p):
            if j not in eta and abs(c[j]) > bound:
                eta[j] = int(s_c[j])
    return None


def cd_solve_grid(inst, lams, tol=1e-12, max_sweeps=10**6):
    """Cold-start coordinate descent at many lambdas at once (float64).

    All problems share the Gram matrix, so one sweep updates coordinate j for
    every unconverged lambda with a single vector operation. Each row stops
    when it passes OPT(tol, tol). Returns ``(W, converged)`` with ``W`` of
    shape ``(len(lams), p)``.
    """
    lams = np.asarray(lams, dtype=np.float64)
    if lams.ndim != 1 or np.any(lams <= 0):
        raise ValueError("lambdas must be a vector of positive values")
    X, y = inst.X, inst.y
    G = X.T @ X
    b = X.T @ y
    d = np.diag(G).copy()
    L, p = len(lams), inst.p
    W = np.zeros((L, p))
    todo = ~_grid_opt(X, y, W, lams, tol)
    for _ in range(max_sweeps):
        idx = np.flatnonzero(todo)
        if idx.size == 0:
            break
        Wa, la = W[idx], lams[idx]
        C = b - Wa @ G
        for j in range(p):
            z = C[:, j] + d[j] * Wa[:, j]
            new = soft_threshold(z, la) / d[j]
            delta = new - Wa[:, j]
            Wa[:, j] = new
            C -= np.outer(delta, G[j])
        W[idx] = Wa
        todo[idx] = ~_grid_opt(X, y, Wa, la, tol)
    return W, ~todo


def _grid_opt(X, y, W, lams, tol):
    """Row-wise OPT(tol, tol) with correlations from fresh residuals."""
    C = (y[None, :] - W @ X.T) @ X
    s = np.sign(W)
    nz = s != 0
    cs = C * s
    lo = lams[:, None] * (1 - tol)
    hi = lams[:, None] * (1 + tol)
    act_ok = (cs >= lo) & (cs <= hi)
    inact_ok = np.abs(C) <= hi
    return np.all(np.where(nz, act_ok, inact_ok), axis=1)
