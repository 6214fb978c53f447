from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lassopath import ProblemInstance, SingularError, build_gram, gen_pathological, gram_solve
from lassopath._numeric import Workspace, to_float
from lassopath.linalg import GramSystem


def cofactor_inverse(A):
    """Exact inverse of a 3x3 matrix via cofactors in rational arithmetic."""
    M = [[Fraction(float(v)) for v in row] for row in A]

    def minor(i, j):
        rows = [r for k, r in enumerate(M) if k != i]
        m = [[v for l, v in enumerate(r) if l != j] for r in rows]
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]

    det = sum((-1) ** j * M[0][j] * minor(0, j) for j in range(3))
    return np.array([[float((-1) ** (i + j) * minor(j, i) / det) for j in range(3)] for i in range(3)])


def test_scalar_system(unit):
    system = build_gram(unit, [0])
    assert system.condition_estimate == pytest.approx(1.0)
    np.testing.assert_allclose(gram_solve(system, np.array([1.0])), [1.0])


def test_identical_columns_are_singular():
    inst = ProblemInstance(np.array([1.0, 2.0]), np.array([[1.0, 1.0], [3.0, 3.0]]))
    with pytest.raises(SingularError):
        build_gram(inst, [0, 1])


def test_identity_columns_return_rhs():
    inst = ProblemInstance(np.ones(4), np.eye(4))
    rhs = np.array([0.3, -2.0, 5.0, 1e-3])
    np.testing.assert_allclose(gram_solve(build_gram(inst, range(4)), rhs), rhs)


def test_pathological_solve_matches_cofactor_inverse():
    inst = gen_pathological(3)
    system = build_gram(inst, [0, 1, 2])
    assert np.isfinite(system.condition_estimate)
    G = inst.X.T @ inst.X
    rhs = np.array([1.0, -1.0, 1.0])
    expected = cofactor_inverse(G) @ rhs
    np.testing.assert_allclose(system.solve(rhs), expected, rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), m=st.integers(1, 6))
def test_solve_round_trip_and_factor(seed, m):
    rng = np.random.default_rng(seed)
    inst = ProblemInstance(rng.standard_normal(10), rng.standard_normal((10, 6)))
    J = list(rng.permutation(6)[:m])
    system = build_gram(inst, J)
    A = inst.X[:, J].T @ inst.X[:, J]
    rhs = rng.standard_normal(m)
    u = system.solve(rhs)
    assert np.linalg.norm(A @ u - rhs) <= 1e-9 * np.linalg.norm(rhs)
    v = rng.standard_normal(m)
    assert np.linalg.norm(A @ v - system.apply(v)) <= 1e-8 * np.linalg.norm(v) * np.linalg.norm(A)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), ops=st.lists(st.integers(0, 7), min_size=1, max_size=12))
def test_incremental_updates_match_scratch(seed, ops):
    # each op toggles a column in or out; the updated factor must equal the
    # from-scratch factor of the same ordered active set
    rng = np.random.default_rng(seed)
    inst = ProblemInstance(rng.standard_normal(12), rng.standard_normal((12, 8)))
    G = inst.X.T @ inst.X
    system = GramSystem((), np.zeros((0, 0)), 1.0, G)
    for j in ops:
        system = system.without(j) if j in system.J else system.with_added(j)
        if system.J:
            scratch = build_gram(inst, system.J)
            np.testing.assert_allclose(system.L, scratch.L, rtol=1e-10, atol=1e-10)
            assert system.J == scratch.J


def test_insertion_order_preserved_and_removal_compacts():
    rng = np.random.default_rng(5)
    inst = ProblemInstance(rng.standard_normal(8), rng.standard_normal((8, 5)))
    system = build_gram(inst, [3, 0, 4]).with_added(1).without(0)
    assert system.J == (3, 4, 1)


def test_extended_precision_solve():
    inst = gen_pathological(4)
    ws = Workspace(inst, 128)
    with ws.context():
        system = build_gram(ws.gram, [0, 1, 2, 3])
        rhs = ws.working(np.array([1.0, -1.0, 1.0, -1.0]))
        u = system.solve(rhs)
        resid = ws.gram @ u - rhs
    assert u.dtype == object
    assert np.max(np.abs(to_float(resid))) < 1e-25


def test_build_gram_rejects_empty_and_oversized(unit):
    with pytest.raises(ValueError):
        build_gram(unit, [])
    with pytest.raises(ValueError):
        build_gram(unit, [0, 1])
