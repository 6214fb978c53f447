import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lassopath import (
    HomotopyOptions,
    OutOfRange,
    ProblemInstance,
    SimultaneousEventsWarning,
    TruncatedPath,
    cd_solve,
    CdOptions,
    check_exact_optimality,
    check_structural_bounds,
    compute_exact_path,
    gen_pathological,
    grid_oracle,
    interpolate,
    next_event,
    objective,
    path_direction,
)
from lassopath.homotopy import leave_step

from conftest import random_instance


def test_unit_path(unit):
    path = compute_exact_path(unit)
    assert path.kind == "exact" and path.terminal
    assert len(path.kinks) == 2
    assert path.kinks[0].lam == 1.0
    np.testing.assert_array_equal(path.kinks[0].coeffs, [0.0])
    for lam in (0.9, 0.7, 0.5):
        np.testing.assert_allclose(interpolate(path, lam), [1 - lam], rtol=1e-15)
    deep = compute_exact_path(unit, HomotopyOptions(lambda_min=0.01))
    np.testing.assert_allclose(interpolate(deep, 0.1), [0.9], rtol=1e-15)


def test_p6_has_365_kinks():
    # count from the figure caption of the worst-case illustration
    path = compute_exact_path(gen_pathological(6))
    assert len(path.kinks) == 365


def test_p2_pattern_sequence():
    path = compute_exact_path(gen_pathological(2))
    assert path.patterns == [(0, 0), (1, 0), (1, 1), (0, 1), (-1, 1)]


def test_p2_matches_grid_oracle():
    inst = gen_pathological(2)
    path = compute_exact_path(inst)
    lo = float(path.kinks[-1].lam)
    grid = np.geomspace(inst.lambda_max * 1.01, lo, 10**4)
    seen = {pt.pattern for pt in grid_oracle(inst, grid)}
    assert seen == set(path.patterns)


def test_lambda_min_stops_the_path(unit):
    path = compute_exact_path(unit, HomotopyOptions(lambda_min=0.25))
    assert path.kinks[-1].lam == 0.25
    np.testing.assert_allclose(path.kinks[-1].coeffs, [0.75])


def test_max_kinks_truncates():
    with pytest.raises(TruncatedPath) as info:
        compute_exact_path(gen_pathological(3), HomotopyOptions(max_kinks=4))
    assert info.value.reason == "max_kinks"
    assert len(info.value.path.kinks) == 4
    assert not info.value.path.terminal


def test_duplicate_columns_truncate_as_singular():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(6)
    X = np.column_stack([x, x, rng.standard_normal(6)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SimultaneousEventsWarning)
        with pytest.raises(TruncatedPath) as info:
            compute_exact_path(ProblemInstance(rng.standard_normal(6), X))
    assert info.value.reason == "singular"


def test_tie_at_lambda_max_enters_both():
    # orthogonal columns with equal correlation: both are active right away
    inst = ProblemInstance(np.array([1.0, 1.0]), np.eye(2))
    with pytest.warns(SimultaneousEventsWarning):
        path = compute_exact_path(inst)
    for lam in (0.8, 0.6):
        np.testing.assert_allclose(interpolate(path, lam), [1 - lam, 1 - lam], rtol=1e-14)


def test_path_direction_examples(unit):
    np.testing.assert_allclose(path_direction(unit, [0], [1]), [1.0])
    inst = ProblemInstance(np.ones(3), np.eye(3))
    np.testing.assert_allclose(path_direction(inst, [0, 2], [1, 0, -1]), [1.0, -1.0])


def test_path_direction_matches_finite_difference():
    inst = gen_pathological(2)
    path = compute_exact_path(inst)
    lam = 0.5 * (path.kinks[1].lam + path.kinks[2].lam)
    J = list(path.kinks[2].active)
    h = 1e-6
    fd = (interpolate(path, lam - h) - interpolate(path, lam)) / h
    d = path_direction(inst, J, path.kinks[2].pattern)
    np.testing.assert_allclose(d, fd[J], rtol=1e-6)


def test_next_event_unit_is_end(unit):
    ev = next_event(unit, 1.0, [0], [1])
    assert ev.kind == "end"


def test_next_event_enter_on_p2():
    inst = gen_pathological(2)
    lam_inf = inst.lambda_max
    ev = next_event(inst, lam_inf, [0], [1, 0], skip_leave={0})
    assert ev.kind == "enter" and ev.index == 1
    # hand solution: w1 = (x1'y - lam)/|x1|^2 and |x2'(y - x1 w1)| = lam
    x1, x2, y = inst.X[:, 0], inst.X[:, 1], inst.y
    a = x1 @ y
    g = x2 @ x1 / (x1 @ x1)
    b = x2 @ y
    lam_hand = (b - g * a) / (1 - g)
    assert ev.lam == pytest.approx(lam_hand, rel=1e-12)
    # dense-grid oracle: variable 2 is still zero just above and nonzero below
    sol_above = cd_solve(inst, lam_hand * (1 + 1e-6), opts=CdOptions(1e-12, 1e-12))
    sol_below = cd_solve(inst, lam_hand * (1 - 1e-6), opts=CdOptions(1e-12, 1e-12))
    assert sol_above[1] == 0 and sol_below[1] != 0


def test_leave_step_example():
    assert leave_step(0.3, -0.1) == pytest.approx(3.0)
    assert leave_step(0.3, 0.1) == math.inf


def test_interpolate_examples(unit):
    path = compute_exact_path(unit)
    np.testing.assert_allclose(interpolate(path, 0.5), [0.5])
    np.testing.assert_array_equal(interpolate(path, 1.0), [0.0])
    with pytest.raises(OutOfRange):
        interpolate(path, 2.0)


@pytest.fixture(scope="module")
def p4():
    inst = gen_pathological(4)
    return inst, compute_exact_path(inst)


@settings(max_examples=80, deadline=None)
@given(t=st.floats(0.0, 1.0))
def test_interpolation_is_optimal_on_p4(p4, t):
    inst, path = p4
    hi, lo = float(path.kinks[0].lam), float(path.kinks[-1].lam)
    lam = hi * (lo / hi) ** t
    w = interpolate(path, lam)
    assert check_exact_optimality(inst, w, lam, 1e-7).passed


@pytest.mark.parametrize("seed", range(5))
def test_random_paths_are_optimal_and_structured(seed):
    inst = random_instance(seed, 40, 15)
    path = compute_exact_path(inst)
    tol = 1e-7 * inst.lambda_max
    for a, b in zip(path.kinks, path.kinks[1:]):
        assert check_exact_optimality(inst, b.coeffs, b.lam, tol).passed
        mid = (a.lam + b.lam) / 2
        assert check_exact_optimality(inst, interpolate(path, mid), mid, tol).passed
    assert check_structural_bounds(path) == (True, True)


@pytest.mark.parametrize("seed", range(3))
def test_objective_agrees_with_cd(seed):
    inst = random_instance(seed, 50, 20)
    lam = 0.3 * inst.lambda_max
    f_path = objective(inst, interpolate(compute_exact_path(inst), lam), lam)
    f_cd = objective(inst, cd_solve(inst, lam, opts=CdOptions(1e-9, 1e-9)), lam)
    assert abs(f_path - f_cd) <= 1e-8 * f_path


def test_extended_precision_matches_float64():
    inst = gen_pathological(4)
    a = compute_exact_path(inst)
    b = compute_exact_path(inst, HomotopyOptions(precision=100))
    assert a.patterns == b.patterns
    np.testing.assert_allclose(np.array(b.lambdas, dtype=float), a.lambdas, rtol=1e-10)
