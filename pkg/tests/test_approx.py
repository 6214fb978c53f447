import math

import numpy as np
import pytest

from lassopath import (
    ApproxOptions,
    MaxKinksExceeded,
    OutOfRange,
    check_opt_condition,
    compute_approx_path,
    compute_exact_path,
    evaluate_path,
    gen_pathological,
    sampled_exact_path,
    segment_bound,
    theta,
    verify_path,
)
from lassopath._numeric import Workspace
from lassopath.verify import certificate_at

from conftest import random_instance

# homotopy records put entering variables exactly on the inflated boundary,
# so the OPT check sees rounding-level excess; allow it relative to lambda
OPT_SLACK = 1e-10


@pytest.mark.parametrize("eps, expected", [(0.0, 1.0), (0.25, 0.875), (1.0, 1.0)])
def test_theta_examples(eps, expected):
    assert theta(eps) == pytest.approx(expected)


def test_segment_bound_examples():
    # fixed-point iteration for the eps with theta(eps) sqrt(eps) = 0.1
    s = 0.1
    for _ in range(100):
        s = 0.1 / theta(s * s)
    eps = s * s
    assert theta(eps) * math.sqrt(eps) == pytest.approx(0.1, rel=1e-12)
    assert segment_bound(math.e, 1.0, eps) == 10
    assert segment_bound(2.0, 2.0, 0.3) == 0
    assert segment_bound(1e4, 1.0, 0.01) == 97


def test_segment_bound_validation():
    with pytest.raises(ValueError):
        segment_bound(1.0, 2.0, 0.1)
    with pytest.raises(ValueError):
        segment_bound(2.0, 1.0, 0.0)


def test_options_validation():
    with pytest.raises(ValueError):
        ApproxOptions(1.0)
    with pytest.raises(ValueError):
        ApproxOptions(0.1, lambda_1=0.0)


def _same_path(a, b):
    # patterns must agree exactly; values up to rounding, since the
    # approximate method re-derives eta from the residual at every step
    assert len(a.kinks) == len(b.kinks)
    for ka, kb in zip(a.kinks, b.kinks):
        assert ka.pattern == kb.pattern
        assert kb.lam == pytest.approx(ka.lam, rel=1e-12)
        np.testing.assert_allclose(kb.coeffs, ka.coeffs, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("p", [1, 3])
def test_eps_zero_reproduces_exact_path(p):
    inst = gen_pathological(p)
    exact = compute_exact_path(inst)
    approx = compute_approx_path(inst, ApproxOptions(0.0, lambda_1=float(exact.kinks[-1].lam)))
    _same_path(exact, approx)


@pytest.mark.parametrize("eps", [1e-3, 1e-2, 0.1])
def test_records_satisfy_opt_and_bound(eps):
    inst = random_instance(11, 60, 25)
    lam1 = 1e-3 * inst.lambda_max
    path = compute_approx_path(inst, ApproxOptions(eps, lambda_1=lam1))
    assert path.kind == "approx" and path.terminal
    assert path.kinks[-1].lam == pytest.approx(lam1, rel=1e-15)
    e = eps / 2
    for k in path.kinks:
        rep = check_opt_condition(inst, k.coeffs, k.lam, e + OPT_SLACK, e + OPT_SLACK)
        assert rep.passed, (k.step, k.lam)
    first_order = sum(k.step == "first_order" for k in path.kinks)
    assert first_order <= segment_bound(inst.lambda_max, lam1, eps)
    assert verify_path(inst, path, num_samples=100).passed


@pytest.mark.parametrize("eps", [1e-2, 0.1])
def test_held_records_stay_approximate(eps):
    # each record must remain eps-approximate all the way down to valid_until
    inst = random_instance(12, 40, 15)
    path = compute_approx_path(inst, ApproxOptions(eps))
    ws = Workspace(inst)
    for k in path.kinks:
        for lam in np.linspace(k.lam, k.valid_until, 5):
            assert certificate_at(ws, k.coeffs, lam).relative_gap <= eps + 1e-12


def test_pathological_approx_path_verifies():
    inst = gen_pathological(6)
    lam1 = float(compute_exact_path(inst).kinks[-1].lam)
    path = compute_approx_path(inst, ApproxOptions(1e-2, lambda_1=lam1))
    assert verify_path(inst, path).passed
    assert len(path.kinks) < 365


def test_max_kinks_exceeded_carries_partial_path():
    inst = random_instance(13, 30, 10)
    with pytest.raises(MaxKinksExceeded) as info:
        compute_approx_path(inst, ApproxOptions(1e-3, max_kinks=3))
    assert len(info.value.path.kinks) == 3


def test_extended_precision_approx():
    inst = gen_pathological(4)
    lam1 = float(compute_exact_path(inst).kinks[-1].lam)
    a = compute_approx_path(inst, ApproxOptions(1e-2, lambda_1=lam1))
    b = compute_approx_path(inst, ApproxOptions(1e-2, lambda_1=lam1, precision=100))
    assert [k.step for k in a.kinks] == [k.step for k in b.kinks]
    assert verify_path(inst, b).passed


def test_sampled_path_examples(unit):
    path = sampled_exact_path(random_instance(3), 0.25, random_instance(3).lambda_max / 2)
    assert len(path.kinks) - 1 <= math.ceil(math.log(2) / 0.5)
    single = sampled_exact_path(unit, 0.25, 1.0)
    assert len(single.kinks) == 1
    np.testing.assert_array_equal(single.kinks[0].coeffs, [0.0])


def test_sampled_path_holds_are_certified(unit):
    eps = 0.01
    path = sampled_exact_path(unit, eps, 0.6)
    ws = Workspace(unit)
    for upper, lower in zip(path.kinks, path.kinks[1:]):
        for lam in (upper.lam, lower.lam):
            assert certificate_at(ws, upper.coeffs, lam).relative_gap <= eps + 1e-12
    assert verify_path(unit, path, eps).passed


def test_evaluate_path(unit):
    approx = compute_approx_path(unit, ApproxOptions(0.1, lambda_1=0.5))
    assert evaluate_path(approx, 1.0)[0] == 0.0
    with pytest.raises(OutOfRange):
        evaluate_path(approx, 0.4)
    exact = compute_exact_path(unit)
    np.testing.assert_allclose(evaluate_path(exact, 0.75), [0.25])
