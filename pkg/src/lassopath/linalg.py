"""Cholesky factorizations of active-set Gram matrices ``X_J^T X_J``.

Factors are kept as lower-triangular ``L`` with ``G_J = L L^T``. Adding a
column is a bordered update and removing one is a Givens rank-one update of
the trailing block, both O(|J|^2). Float64 factors use LAPACK triangular
solves; extended-precision factors (object arrays of mpfr) use the plain
loops below.

Conditioning is measured on the equilibrated Gram ``D G_J D`` with
``D = diag(G_jj)^{-1/2}``, whose Cholesky factor is simply ``D L``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, solve_triangular

from ._numeric import is_extended, sqrt, to_float
from .exceptions import DimensionError, SingularError

COND_THRESHOLD = 1e12

__all__ = ["GramSystem", "build_gram", "gram_solve", "COND_THRESHOLD"]


def _forward(L, b):
    """Solve ``L x = b`` for lower-triangular ``L`` (``b`` a vector or matrix)."""
    if not is_extended(L):
        return solve_triangular(L, b, lower=True, check_finite=False)
    m = len(b)
    x = np.empty(b.shape, dtype=object)
    for i in range(m):
        s = b[i] - (L[i, :i] @ x[:i] if i else 0)
        x[i] = s / L[i, i]
    return x


def _backward(L, b):
    """Solve ``L^T x = b``."""
    if not is_extended(L):
        return solve_triangular(L, b, lower=True, trans="T", check_finite=False)
    m = len(b)
    x = np.empty(b.shape, dtype=object)
    for i in range(m - 1, -1, -1):
        s = b[i] - (L[i + 1 :, i] @ x[i + 1 :] if i < m - 1 else 0)
        x[i] = s / L[i, i]
    return x


def _givens(a, b):
    r = sqrt(a * a + b * b)
    return a / r, b / r, r


def _chol_update(L, x):
    """Factor of ``L L^T + x x^T`` (lower triangular, new array)."""
    L = L.copy()
    x = x.copy()
    m = L.shape[0]
    for k in range(m):
        c, s, r = _givens(L[k, k], x[k])
        L[k, k] = r
        if k + 1 < m:
            lk = L[k + 1 :, k].copy()
            L[k + 1 :, k] = c * lk + s * x[k + 1 :]
            x[k + 1 :] = c * x[k + 1 :] - s * lk
    return L


def _chol(A):
    """Plain Cholesky returning ``None`` on a nonpositive pivot."""
    m = A.shape[0]
    if not is_extended(A):
        c, info = lapack.dpotrf(np.asarray(A, dtype=np.float64), lower=1, clean=1)
        return c if info == 0 else None
    L = np.empty((m, m), dtype=object)
    L[...] = 0 * A[0, 0]
    for k in range(m):
        d = A[k, k] - (L[k, :k] @ L[k, :k] if k else 0)
        if not d > 0:
            return None
        L[k, k] = sqrt(d)
        if k + 1 < m:
            col = A[k + 1 :, k] - (L[k + 1 :, :k] @ L[k, :k] if k else 0)
            L[k + 1 :, k] = col / L[k, k]
    return L


def _condition(L):
    """1-norm condition estimate of the equilibrated matrix ``L L^T``."""
    Lf = to_float(L)
    if not np.all(np.isfinite(Lf)):
        return np.inf
    row = np.sqrt(np.einsum("ij,ij->i", Lf, Lf))
    if np.any(row == 0):
        return np.inf
    Lh = Lf / row[:, None]
    A = Lh @ Lh.T
    anorm = np.max(np.sum(np.abs(A), axis=0))
    rcond, info = lapack.dpocon(Lh, anorm, uplo="L")
    if info != 0 or rcond <= 0:
        return np.inf
    return 1.0 / rcond


@dataclass(frozen=True, eq=False)
class GramSystem:
    """Factorization of ``G[J][:, J]`` for an ordered active set ``J``.

    ``gram`` is the full p x p Gram matrix the subsystem was taken from; it is
    kept so that columns can be appended without touching X again.
    """

    J: tuple
    L: np.ndarray
    condition_estimate: float
    gram: np.ndarray
    threshold: float = COND_THRESHOLD

    def solve(self, rhs):
        """``G_J^{-1} rhs`` for a vector or a matrix of right-hand sides."""
        rhs = np.asarray(rhs)
        if rhs.ndim not in (1, 2) or rhs.shape[0] != len(self.J):
            raise DimensionError(f"rhs must have {len(self.J)} rows")
        if not self.J:
            return rhs.copy()
        return _backward(self.L, _forward(self.L, rhs))

    def apply(self, v):
        """``(L L^T) v``, i.e. the Gram matrix as reproduced by the factor."""
        return self.L @ (self.L.T @ np.asarray(v))

    def matrix(self):
        idx = list(self.J)
        return self.gram[np.ix_(idx, idx)]

    def with_added(self, j):
        """Factor for ``J + [j]`` via a bordered update."""
        if j in self.J:
            raise ValueError(f"index {j} already active")
        J = self.J + (j,)
        if not self.J:
            return _from_matrix(self.gram, J, self.threshold)
        b = self.gram[list(self.J), j]
        l = _forward(self.L, b)
        d2 = self.gram[j, j] - l @ l
        if not d2 > 0:
            raise SingularError(J, np.inf)
        m = len(J)
        L = np.zeros((m, m), dtype=self.L.dtype)
        if is_extended(self.L):
            L[...] = 0 * self.L[0, 0]
        L[:-1, :-1] = self.L
        L[-1, :-1] = l
        L[-1, -1] = sqrt(d2)
        return _finish(L, J, self.gram, self.threshold)

    def without(self, j):
        """Factor for ``J`` with ``j`` removed (order of the others kept)."""
        k = self.J.index(j)
        J = self.J[:k] + self.J[k + 1 :]
        m = len(self.J)
        if m == 1:
            return GramSystem((), self.L[:0, :0], 1.0, self.gram, self.threshold)
        L = np.delete(np.delete(self.L, k, axis=0), k, axis=1)
        if k < m - 1:
            tail = _chol_update(L[k:, k:], self.L[k + 1 :, k])
            L[k:, k:] = tail
        return _finish(L, J, self.gram, self.threshold)


def _finish(L, J, gram, threshold):
    cond = _condition(L)
    if cond > threshold:
        raise SingularError(J, cond)
    return GramSystem(tuple(J), L, cond, gram, threshold)


def _from_matrix(gram, J, threshold):
    idx = list(J)
    L = _chol(gram[np.ix_(idx, idx)])
    if L is None:
        raise SingularError(J, np.inf)
    return _finish(L, J, gram, threshold)


def build_gram(source, J, threshold=COND_THRESHOLD):
    """Factor ``X_J^T X_J`` from scratch.

    ``source`` is a :class:`~lassopath.model.ProblemInstance` or a full Gram
    matrix (float64 or extended precision). Raises :class:`SingularError`
    when the equilibrated condition estimate exceeds ``threshold``.
    """
    J = tuple(int(j) for j in J)
    if not J:
        raise ValueError("active set must be nonempty")
    gram = source if isinstance(source, np.ndarray) else source.X.T @ source.X
    if len(set(J)) != len(J):
        raise SingularError(J, np.inf)
    if len(J) > gram.shape[0]:
        raise ValueError("active set larger than the number of columns")
    return _from_matrix(gram, J, threshold)


def gram_solve(system, rhs):
    return system.solve(rhs)
