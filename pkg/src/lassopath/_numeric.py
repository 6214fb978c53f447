"""Working-precision helpers.

Every solver in the package runs either on plain float64 arrays or, when a
``precision`` (in bits) is requested, on numpy object arrays holding
``gmpy2.mpfr`` scalars. The same numpy expressions serve both cases; the
functions here cover the handful of operations that differ.
"""

import contextlib
import math

import gmpy2
import numpy as np

__all__ = [
    "Workspace",
    "is_extended",
    "precision_context",
    "signs",
    "sqrt",
    "to_float",
    "to_working",
]


def precision_context(precision):
    """Context manager selecting the mpfr precision (no-op for float64)."""
    if precision is None:
        return contextlib.nullcontext()
    if precision < 53:
        raise ValueError("extended precision must be at least 53 bits")
    return gmpy2.context(gmpy2.get_context(), precision=int(precision))


def is_extended(a):
    return isinstance(a, np.ndarray) and a.dtype == object


def to_working(a, precision):
    """Convert float data to the working representation.

    Conversion from float64 to mpfr is exact, so an instance keeps its exact
    value whatever precision it is solved in.
    """
    a = np.asarray(a)
    if precision is None:
        return np.asarray(a, dtype=np.float64)
    if a.dtype == object:
        return a.copy()
    out = np.empty(a.shape, dtype=object)
    flat = out.reshape(-1)
    for i, v in enumerate(np.asarray(a, dtype=np.float64).reshape(-1)):
        flat[i] = gmpy2.mpfr(float(v))
    return out


def to_float(a):
    if isinstance(a, np.ndarray):
        return np.asarray(a, dtype=np.float64)
    return float(a)


def signs(a):
    """Entrywise sign as int8, valid for float and mpfr arrays."""
    a = np.asarray(a)
    return np.where(a > 0, 1, np.where(a < 0, -1, 0)).astype(np.int8)


_MPFR = type(gmpy2.mpfr(0))


def sqrt(x):
    if isinstance(x, _MPFR):
        return gmpy2.sqrt(x)
    return math.sqrt(x)


class Workspace:
    """Instance data converted once to the working precision.

    Holds X, y, the full Gram matrix X^T X and X^T y; all solvers that need
    correlations for many active sets reuse these.
    """

    def __init__(self, inst, precision=None):
        self.inst = inst
        self.precision = precision
        with precision_context(precision):
            self.X = to_working(inst.X, precision)
            self.y = to_working(inst.y, precision)
            self.gram = self.X.T @ self.X
            self.Xty = self.X.T @ self.y
            self.col_norms_sq = np.diagonal(self.gram).copy()
            self._ints = {v: gmpy2.mpfr(v) for v in (-1, 0, 1)} if precision else {}
        # column views for coordinate sweeps
        self.cols = [self.X[:, j].copy() for j in range(inst.p)]

    def context(self):
        return precision_context(self.precision)

    def zeros(self, m):
        if self.precision is None:
            return np.zeros(m)
        # mpfr scalars are immutable, so one shared zero is safe
        return np.full(m, self._ints[0], dtype=object)

    def working(self, a):
        return to_working(a, self.precision)

    def sign_vector(self, values):
        """Working-precision vector of small integers (sign patterns)."""
        if self.precision is None:
            return np.array(values, dtype=np.float64)
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = self._ints.get(v) or gmpy2.mpfr(v)
        return out

    def scalar(self, v):
        if self.precision is None:
            return float(v)
        return gmpy2.mpfr(v)
