"""Exact homotopy (LARS with the Lasso sign modification).

On a segment with active set ``J`` and signs ``eta_J`` the solution is
``w_J(lam) = u - lam * d`` with ``u = G_J^{-1} X_J^T y`` and
``d = G_J^{-1} eta_J``, and every correlation is affine in ``lam``:
``c(lam) = c0 + lam * a`` with ``c0 = X^T y - G[:, J] u`` and
``a = G[:, J] d``. Breakpoints are therefore computed directly from
``(J, eta)`` rather than by accumulating steps, which keeps the error of
each kink at the rounding level of that kink's own lambda. This matters for
the worst-case instances, whose kinks crowd together near zero.
"""

import bisect
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._numeric import Workspace, signs
from .exceptions import OutOfRange, SimultaneousEventsWarning, SingularError, TruncatedPath
from .linalg import COND_THRESHOLD, build_gram
from .model import Kink, RegularizationPath

__all__ = [
    "HomotopyOptions",
    "PathEvent",
    "compute_exact_path",
    "interpolate",
    "next_event",
    "path_direction",
]

MAX_KINKS_CAP = 10**7


@dataclass(frozen=True)
class HomotopyOptions:
    """Knobs for :func:`compute_exact_path`.

    lambda_min
        Stop once the next breakpoint would fall at or below this value. With
        the default 0 the path is followed until no breakpoint remains and a
        final point is recorded at half the last breakpoint.
    event_tol
        Relative tolerance (times the current lambda) under which two
        breakpoints count as simultaneous.
    max_kinks
        Defaults to ``10 * (3**p + 1) / 2`` capped at 1e7.
    precision
        ``None`` for float64, or a number of bits for mpfr arithmetic.
    """

    lambda_min: float = 0.0
    event_tol: float = 1e-12
    max_kinks: Optional[int] = None
    precision: Optional[int] = None
    cond_threshold: float = COND_THRESHOLD

    def __post_init__(self):
        if self.lambda_min < 0:
            raise ValueError("lambda_min must be nonnegative")
        if self.max_kinks is not None and self.max_kinks < 1:
            raise ValueError("max_kinks must be >= 1")
        if self.event_tol < 0:
            raise ValueError("event_tol must be nonnegative")


def default_max_kinks(p):
    if p >= 15:
        return MAX_KINKS_CAP
    return min(MAX_KINKS_CAP, 10 * (3**p + 1) // 2)


@dataclass(frozen=True)
class PathEvent:
    """A breakpoint ``tau`` below the current lambda.

    ``kind`` is ``"enter"``, ``"leave"`` or ``"end"``; ``sign`` is the sign
    taken by an entering variable (or held by a leaving one).
    """

    tau: object
    kind: str
    index: Optional[int] = None
    sign: int = 0
    lam: object = None


@dataclass
class _Segment:
    J: list
    u: np.ndarray
    d: np.ndarray
    c0: np.ndarray
    a: np.ndarray

    def w_active(self, lam):
        return self.u - lam * self.d

    def full(self, lam, p, zeros):
        w = zeros(p)
        if self.J:
            w[self.J] = self.w_active(lam)
        return w


def _segment(ws, gram_sys, eta_J):
    J = list(gram_sys.J)
    if not J:
        return _Segment(J, ws.zeros(0), ws.zeros(0), ws.Xty.copy(), ws.zeros(ws.inst.p))
    u = gram_sys.solve(ws.Xty[J])
    d = gram_sys.solve(eta_J)
    GJ = ws.gram[:, J]
    return _Segment(J, u, d, ws.Xty - GJ @ u, GJ @ d)


def _scan(seg, lam, floor, p, inflate=1, skip_leave=(), skip_enter=(), event_tol=1e-12):
    """All breakpoints tied for the largest lambda in ``(floor, lam)``.

    An inactive ``j`` enters when ``c_j(l) = s * l * inflate``; an active one
    leaves when ``w_j(l) = 0``. ``skip_leave`` holds indices that just
    entered (their zero crossing is the current kink) and ``skip_enter``
    holds ``(j, sign)`` pairs that just left.
    """
    active = np.zeros(p, dtype=bool)
    active[seg.J] = True
    band = event_tol * lam
    cands = []
    immediate = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for s in (1, -1):
            slope = s * inflate - seg.a
            roots = seg.c0 / slope
            ok = (~active) & (roots < lam) & (roots > floor)
            for j, s_skip in skip_enter:
                if s_skip == s:
                    ok[j] = False
            cands.append((roots, ok, s))
            # on the boundary now and not moving inward as lam decreases:
            # enters at the current lambda (ties at lambda_max, duplicate columns)
            gap = seg.c0 - lam * slope
            on = (~active) & (abs(gap) <= band) & (s * slope >= -event_tol)
            for j in np.flatnonzero(on):
                if (int(j), s) not in skip_enter:
                    immediate.append((lam, "enter", int(j), s))
        if seg.J:
            roots = seg.u / seg.d
            ok = (roots < lam) & (roots > floor)
            for i, j in enumerate(seg.J):
                if j in skip_leave:
                    ok[i] = False
            cands.append((roots, ok, 0))
    if immediate:
        immediate.sort(key=lambda c: c[2])
        warnings.warn(
            f"{len(immediate)} variable(s) tied with the active set at lambda={float(lam):.17g}: "
            + ", ".join(f"enter({j})" for _, _, j, _ in immediate),
            SimultaneousEventsWarning,
            stacklevel=4,
        )
        return [PathEvent(0 * lam, kind, j, s, lam) for _, kind, j, s in immediate]
    best = None
    for roots, ok, _ in cands:
        if ok.any():
            m = roots[ok].max()
            if best is None or m > best:
                best = m
    if best is None:
        return []
    tied = []
    for roots, ok, s in cands:
        for i in np.flatnonzero(ok):
            if best - roots[i] <= band:
                if s:
                    tied.append((roots[i], "enter", int(i), s))
                else:
                    j = seg.J[i]
                    tied.append((roots[i], "leave", j, -1 if seg.d[i] > 0 else 1))
    tied.sort(key=lambda c: c[2])
    if len(tied) > 1:
        warnings.warn(
            f"{len(tied)} simultaneous events at lambda={float(best):.17g}: "
            + ", ".join(f"{k}({j})" for _, k, j, _ in tied),
            SimultaneousEventsWarning,
            stacklevel=4,
        )
    return [PathEvent(lam - best, kind, j, s, best) for _, kind, j, s in tied]


def _segment_pattern(seg, lam_hi, lam_lo, p):
    s = np.zeros(p, dtype=np.int8)
    if seg.J:
        s[seg.J] = signs(seg.w_active((lam_hi + lam_lo) / 2))
    return tuple(int(v) for v in s)


def path_direction(inst, J, eta, precision=None):
    """Direction ``d_J = G_J^{-1} eta_J``; ``w_J(lam - tau) = w_J(lam) + tau d_J``."""
    J = [int(j) for j in J]
    eta = np.asarray(eta)
    eta_J = eta[J] if eta.shape == (inst.p,) else eta
    ws = Workspace(inst, precision)
    with ws.context():
        system = build_gram(ws.gram, J)
        return system.solve(ws.working(eta_J))


def next_event(inst, lam, active, eta, lambda_min=0.0, event_tol=1e-12, skip_leave=(), skip_enter=()):
    """First breakpoint below ``lam`` for the segment defined by ``(active, eta)``.

    Returns a ``PathEvent``; ``kind == "end"`` when nothing happens above
    ``lambda_min``. Simultaneous events emit a warning and the lowest index
    is returned.
    """
    active = [int(j) for j in active]
    eta = np.asarray(eta, dtype=np.float64)
    eta_J = eta[active] if eta.shape == (inst.p,) else eta
    ws = Workspace(inst)
    system = build_gram(ws.gram, active)
    seg = _segment(ws, system, eta_J)
    events = _scan(seg, lam, lambda_min, inst.p, 1, set(skip_leave), set(skip_enter), event_tol)
    if not events:
        return PathEvent(lam - lambda_min, "end", lam=lambda_min)
    return events[0]


def leave_step(w_j, d_j):
    """Step ``tau`` at which ``w_j + tau d_j`` reaches zero (inf if never)."""
    if w_j == 0 or d_j == 0 or (w_j > 0) == (d_j > 0):
        return math.inf
    return -w_j / d_j


def compute_exact_path(inst, opts=None):
    """Follow the exact path from ``lambda_max`` down to ``opts.lambda_min``.

    Raises :class:`TruncatedPath` (``reason`` ``"singular"`` or
    ``"max_kinks"``) carrying the valid part of the path.
    """
    opts = opts or HomotopyOptions()
    ws = Workspace(inst, opts.precision)
    with ws.context():
        return _follow_exact(ws, opts)


def _follow_exact(ws, opts):
    inst = ws.inst
    p = inst.p
    max_kinks = opts.max_kinks or default_max_kinks(p)
    absc = np.abs(ws.Xty)
    lam_inf = np.max(absc)
    if not lam_inf > 0:
        raise ValueError("X^T y = 0: the path is identically zero")
    # ties for the maximum go to the smallest index
    j0 = next(j for j in range(p) if absc[j] == lam_inf)
    floor = ws.scalar(opts.lambda_min)

    kinks = [Kink(lam_inf, ws.zeros(p), (), (0,) * p, "start")]

    def make_path(terminal):
        return RegularizationPath(
            tuple(kinks), "exact", None, float(lam_inf), p, opts.precision, terminal
        )

    J = [j0]
    eta = {j0: int(signs(ws.Xty[j0 : j0 + 1])[0])}
    try:
        gram = build_gram(ws.gram, J, opts.cond_threshold)
    except SingularError as exc:
        raise TruncatedPath("singular", make_path(False), str(exc)) from exc
    skip_leave, skip_enter = {j0}, set()
    lam = lam_inf
    while True:
        if len(kinks) >= max_kinks:
            raise TruncatedPath("max_kinks", make_path(False))
        seg = _segment(ws, gram, ws.sign_vector([eta[j] for j in gram.J]))
        events = _scan(seg, lam, floor, p, 1, skip_leave, skip_enter, opts.event_tol)
        if events and events[0].lam == lam:
            try:
                for ev in events:
                    gram = gram.with_added(ev.index)
                    eta[ev.index] = ev.sign
                    skip_leave.add(ev.index)
            except SingularError as exc:
                raise TruncatedPath("singular", make_path(False), str(exc)) from exc
            continue
        terminal = not events
        lam_next = events[0].lam if events else (floor if floor > 0 else lam / 2)
        w = seg.full(lam_next, p, ws.zeros)
        for ev in events:
            if ev.kind == "leave":
                w[ev.index] = 0
        pattern = _segment_pattern(seg, lam, lam_next, p)
        kinks.append(Kink(lam_next, w, tuple(gram.J), pattern, "end" if terminal else "homotopy"))
        if terminal:
            return make_path(True)
        skip_leave, skip_enter = set(), set()
        try:
            for ev in events:
                if ev.kind == "leave":
                    gram = gram.without(ev.index)
                    skip_enter.add((ev.index, eta.pop(ev.index)))
                else:
                    gram = gram.with_added(ev.index)
                    eta[ev.index] = ev.sign
                    skip_leave.add(ev.index)
        except SingularError as exc:
            raise TruncatedPath("singular", make_path(False), str(exc)) from exc
        lam = lam_next


def interpolate(path, lam):
    """Solution at ``lam`` by linear interpolation between bracketing kinks."""
    kinks = path.kinks
    lo = kinks[-1].lam
    hi = kinks[0].lam
    if not (lo <= lam <= hi):
        raise OutOfRange(f"lambda {float(lam):.6g} outside [{float(lo):.6g}, {float(hi):.6g}]")
    neg = [-float(k.lam) for k in kinks]
    i = bisect.bisect_left(neg, -float(lam))
    i = min(max(i, 0), len(kinks) - 1)
    # bisect on rounded values; settle the bracket with exact comparisons
    while i > 0 and kinks[i - 1].lam <= lam:
        i -= 1
    while i < len(kinks) - 1 and kinks[i].lam > lam:
        i += 1
    if kinks[i].lam == lam or i == 0:
        return kinks[i].coeffs.copy()
    upper, lower = kinks[i - 1], kinks[i]
    t = (upper.lam - lam) / (upper.lam - lower.lam)
    return upper.coeffs + t * (lower.coeffs - upper.coeffs)
