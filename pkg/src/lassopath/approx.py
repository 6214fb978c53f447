"""Approximate regularization paths with relative duality-gap guarantees.

:func:`compute_approx_path` follows approximate directions while breakpoints
are far apart and otherwise shrinks lambda by the factor ``1 - theta sqrt(eps)``
and re-solves with coordinate descent. Every recorded solution satisfies
OPT(eps/2, eps/2) and therefore has relative duality gap at most ``eps``;
each one also stays ``eps``-approximate when held down to
``lam (1 - theta sqrt(eps))``, which is recorded as ``valid_until``.

:func:`sampled_exact_path` is the simpler construction that samples exact
solutions on the geometric grid ``lam_inf (1 - sqrt(eps))^k`` and holds each.
"""

import bisect
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._numeric import Workspace, signs, sqrt
from .cd import CdOptions, run_cd
from .exceptions import MaxKinksExceeded, OutOfRange, SingularError
from .homotopy import (
    HomotopyOptions,
    _scan,
    _segment,
    _segment_pattern,
    compute_exact_path,
    default_max_kinks,
    interpolate,
)
from .linalg import COND_THRESHOLD, GramSystem, build_gram
from .model import Kink, RegularizationPath

__all__ = [
    "ApproxOptions",
    "compute_approx_path",
    "evaluate_path",
    "sampled_exact_path",
    "segment_bound",
    "theta",
]

DEFAULT_LAMBDA1_RATIO = 1e-3


@dataclass(frozen=True)
class ApproxOptions:
    """Settings for :func:`compute_approx_path`.

    epsilon
        Target relative duality gap, ``0 <= eps < 1``. ``eps = 0`` reduces the
        method to exact path following.
    lambda_1
        Lower end of the path; defaults to ``1e-3 * lambda_max``.
    max_kinks
        Budget on recorded pairs; defaults to twice the iteration bound plus
        slack (or the exact-path default when ``eps = 0``).
    precision
        ``None`` for float64, or a number of bits for mpfr arithmetic.
    """

    epsilon: float
    lambda_1: Optional[float] = None
    max_kinks: Optional[int] = None
    precision: Optional[int] = None
    event_tol: float = 1e-12
    max_sweeps: int = 10**6
    cond_threshold: float = COND_THRESHOLD

    def __post_init__(self):
        if not 0 <= self.epsilon < 1:
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.lambda_1 is not None and not self.lambda_1 > 0:
            raise ValueError("lambda_1 must be positive")
        if self.max_kinks is not None and self.max_kinks < 1:
            raise ValueError("max_kinks must be >= 1")


def theta(epsilon):
    """``1 + eps/2 - sqrt(eps)/2``."""
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    return 1 + epsilon / 2 - sqrt(epsilon) / 2


def segment_bound(lambda_inf, lambda_1, epsilon):
    """Iteration bound ``ceil(log(lambda_inf / lambda_1) / (theta sqrt(eps)))``."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if not lambda_inf >= lambda_1 > 0:
        raise ValueError("need lambda_inf >= lambda_1 > 0")
    ratio = math.log(float(lambda_inf) / float(lambda_1))
    return math.ceil(ratio / (theta(epsilon) * math.sqrt(epsilon)))


def compute_approx_path(inst, opts):
    """Approximate path on ``[lambda_1, lambda_max]``.

    Each record carries ``step`` (``"start"``, ``"homotopy"`` or
    ``"first_order"``) and ``valid_until``. Raises :class:`MaxKinksExceeded`
    with the partial path, and lets :class:`~lassopath.exceptions.MaxSweepsExceeded`
    from the inner solver propagate.
    """
    ws = Workspace(inst, opts.precision)
    with ws.context():
        return _follow_approx(ws, opts)


def _empty_system(ws, opts):
    return GramSystem((), ws.gram[:0, :0], 1.0, ws.gram, opts.cond_threshold)


def _system_for(ws, J, opts):
    if not J:
        return _empty_system(ws, opts)
    try:
        return build_gram(ws.gram, J, opts.cond_threshold)
    except SingularError:
        return None


def _follow_approx(ws, opts):
    inst = ws.inst
    p = inst.p
    eps = ws.scalar(opts.epsilon)
    inflate = 1 + eps / 2
    shrink = theta(eps) * sqrt(eps)
    absc = np.abs(ws.Xty)
    lam_inf = np.max(absc)
    if not lam_inf > 0:
        raise ValueError("X^T y = 0: the path is identically zero")
    lam1 = ws.scalar(
        opts.lambda_1 if opts.lambda_1 is not None else DEFAULT_LAMBDA1_RATIO * float(lam_inf)
    )
    if not lam1 < lam_inf:
        raise ValueError("lambda_1 must be below lambda_max")
    if opts.max_kinks:
        max_kinks = opts.max_kinks
    elif opts.epsilon > 0:
        max_kinks = 2 * segment_bound(float(lam_inf), float(lam1), opts.epsilon) + 10
    else:
        max_kinks = default_max_kinks(p)
    cd_opts = CdOptions(
        opts.epsilon / 2, opts.epsilon / 2, opts.max_sweeps, polish=True, precision=opts.precision
    )

    def hold(lam):
        return lam * (1 - shrink)

    w = ws.zeros(p)
    kinks = [Kink(lam_inf, w.copy(), (), (0,) * p, "start", hold(lam_inf))]

    def make_path(terminal=True):
        return RegularizationPath(
            tuple(kinks), "approx", opts.epsilon, float(lam_inf), p, opts.precision, terminal
        )

    j0 = next(j for j in range(p) if absc[j] == lam_inf)
    gram = _system_for(ws, [j0], opts)
    skip_enter = set()
    lam = lam_inf
    while lam > lam1:
        if len(kinks) >= max_kinks:
            raise MaxKinksExceeded(make_path(False), max_kinks)
        events, lam_next, seg = None, None, None
        if gram is not None:
            J = list(gram.J)
            c = ws.X.T @ (ws.y - ws.X @ w)
            seg = _segment(ws, gram, c[J] / lam)
            skip_leave = {j for j in J if w[j] == 0}
            events = _scan(seg, lam, 0, p, inflate, skip_leave, skip_enter, opts.event_tol)
            lam_ev = events[0].lam if events else 0 * lam
            if lam_ev == lam:
                # variables tied with the boundary join J at the current lambda
                try:
                    for ev in events:
                        gram = gram.with_added(ev.index)
                except SingularError:
                    gram = None
                continue
            if lam_ev <= lam1:
                events, lam_next = [], lam1
            elif lam - lam_ev >= lam * shrink:
                lam_next = lam_ev
        if lam_next is not None:
            w = seg.full(lam_next, p, ws.zeros)
            for ev in events:
                if ev.kind == "leave":
                    w[ev.index] = 0
            pattern = _segment_pattern(seg, lam, lam_next, p)
            kinks.append(Kink(lam_next, w.copy(), tuple(gram.J), pattern, "homotopy", hold(lam_next)))
            skip_enter = set()
            try:
                for ev in events:
                    if ev.kind == "leave":
                        gram = gram.without(ev.index)
                        skip_enter.add((ev.index, ev.sign))
                    else:
                        gram = gram.with_added(ev.index)
            except SingularError:
                gram = None
        else:
            lam_next = hold(lam)
            if lam_next < lam1:
                lam_next = lam1
            w, _ = run_cd(ws, lam_next, w, cd_opts)
            s = signs(w)
            J = [j for j in range(p) if s[j]]
            kinks.append(
                Kink(lam_next, w.copy(), tuple(J), tuple(int(v) for v in s), "first_order", hold(lam_next))
            )
            gram = _system_for(ws, J, opts)
            skip_enter = set()
        lam = lam_next
    return make_path()


def sampled_exact_path(inst, epsilon, lambda_1, precision=None):
    """Exact solutions sampled at ``lam_inf (1 - sqrt(eps))^k`` and at ``lambda_1``.

    Each sample is held down to the next one (step ``"sample"``).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    exact = compute_exact_path(inst, HomotopyOptions(precision=precision))
    lam_inf = exact.kinks[0].lam
    if not 0 < lambda_1 <= lam_inf:
        raise ValueError("need 0 < lambda_1 <= lambda_max")
    ws = Workspace(inst, precision)
    with ws.context():
        step = 1 - sqrt(ws.scalar(epsilon))
        lam1 = ws.scalar(lambda_1)
        lams = [lam_inf]
        while lams[-1] * step > lam1:
            lams.append(lams[-1] * step)
        if lams[-1] > lam1:
            lams.append(lam1)
        kinks = []
        for i, lam in enumerate(lams):
            w = _exact_at(exact, lam)
            s = tuple(int(v) for v in signs(w))
            active = tuple(j for j, v in enumerate(s) if v)
            kinks.append(Kink(lam, w, active, s, "start" if i == 0 else "sample", lam * step))
    return RegularizationPath(tuple(kinks), "approx", epsilon, float(lam_inf), inst.p, precision)


def _exact_at(exact, lam):
    if lam >= exact.kinks[0].lam:
        return exact.kinks[0].coeffs.copy()
    if lam < exact.kinks[-1].lam:
        raise OutOfRange("lambda_1 lies below the computed exact path")
    return interpolate(exact, lam)


def evaluate_path(path, lam):
    """Solution carried by ``path`` at ``lam``.

    Exact paths are interpolated. On approximate paths a piece ending in a
    homotopy record is linear between its ends; any other piece holds the
    upper record's coefficients.
    """
    if path.kind == "exact":
        return interpolate(path, lam)
    kinks = path.kinks
    hi, lo = kinks[0].lam, kinks[-1].lam
    if not lo <= lam <= hi:
        raise OutOfRange(f"lambda {float(lam):.6g} outside [{float(lo):.6g}, {float(hi):.6g}]")
    neg = [-float(k.lam) for k in kinks]
    i = bisect.bisect_left(neg, -float(lam))
    i = min(max(i, 0), len(kinks) - 1)
    while i > 0 and kinks[i - 1].lam <= lam:
        i -= 1
    while i < len(kinks) - 1 and kinks[i].lam > lam:
        i += 1
    if kinks[i].lam == lam or i == 0:
        return kinks[i].coeffs.copy()
    upper, lower = kinks[i - 1], kinks[i]
    if lower.step == "homotopy":
        t = (upper.lam - lam) / (upper.lam - lower.lam)
        return upper.coeffs + t * (lower.coeffs - upper.coeffs)
    return upper.coeffs.copy()
