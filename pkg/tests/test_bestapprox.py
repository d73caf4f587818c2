import math

import numpy as np
import pytest

from lblab.bestapprox import (ConditioningError, best_l1, best_uniform,
                              best_weighted_l2)
from lblab.bounds import chebyshev_lb_inf, l1_lb, l2_weighted_exact, maxnorm_lb


def inv(x):
    return 1.0 / x


def test_uniform_constant_fit_of_reciprocal():
    # best constant for 1/eta on [1, 4] is (1 + 1/4)/2 = 5/8, error 3/8
    err, coef = best_uniform(inv, (1, 4), 0)
    assert err == pytest.approx(3 / 8, rel=1e-6)
    assert coef[0] == pytest.approx(5 / 8, rel=1e-6)
    assert err >= maxnorm_lb(1, 4, 0, 0) - 1e-9


def test_uniform_exact_representability():
    err, coef = best_uniform(lambda x: 2 * x ** 2 - 3 * x + 1, (0, 2), 2)
    assert err <= 1e-9
    assert coef == pytest.approx([1, -3, 2], abs=1e-8)


def test_uniform_respects_shifted_lower_bound():
    # approximating 1/(eta - c) on [-1, 1] with c = -2, i.e. 1/(eta + 2)
    for k in range(4):
        err, _ = best_uniform(lambda x: 1 / (x + 2), (-1, 1), k)
        assert err >= chebyshev_lb_inf(2.0, k) - 1e-9


def test_uniform_monotone_in_k():
    errs = [best_uniform(inv, (1, 4), k)[0] for k in range(6)]
    assert all(a >= b - 1e-12 for a, b in zip(errs, errs[1:]))


def test_uniform_grid_refinement_stable():
    e1, _ = best_uniform(inv, (1, 4), 3, grid=2049)
    e2, _ = best_uniform(inv, (1, 4), 3, grid=4097)
    assert abs(e1 - e2) / e2 < 1e-4


def test_uniform_rejects_bad_input():
    with pytest.raises(ValueError):
        best_uniform(inv, (4, 1), 2)
    with pytest.raises(ValueError):
        best_uniform(inv, (1, 4), 10, grid=32)


def test_l1_empty_candidate_set():
    # against the zero polynomial the L1 error is just int_1^4 deta/eta = ln 4
    err, coef = best_l1(inv, (1, 4), -1)
    assert err == pytest.approx(math.log(4), rel=1e-5)
    assert np.all(coef == 0)


def test_l1_zero_target():
    err, _ = best_l1(lambda x: np.zeros_like(np.asarray(x, dtype=float)), (1, 4), 2)
    assert err <= 1e-9


def test_l1_respects_lower_bound():
    c = 2.5  # with [mu, L] = [1, 4] this makes the rate ratio 1/3
    half = 1.5  # target lives on the centered interval [-(L-mu)/2, (L-mu)/2]
    for k in range(1, 5):
        err, _ = best_l1(lambda x: 1 / (x + c), (-half, half), k - 1)
        assert err >= l1_lb(4, 1, c, k) - 1e-9


def test_l1_monotone_in_k():
    errs = [best_l1(inv, (1, 4), k)[0] for k in range(-1, 5)]
    assert all(a >= b - 1e-10 for a, b in zip(errs, errs[1:]))


def test_weighted_l2_matches_closed_form():
    for alpha in (-0.9, -0.5, -0.1):
        for k in range(9):
            err2, _ = best_weighted_l2(alpha, k)
            assert err2 == pytest.approx(l2_weighted_exact(alpha, k), rel=1e-9)


def test_weighted_l2_base_cases():
    err2, coefs = best_weighted_l2(-0.5, 0)
    assert err2 == pytest.approx(1 / 1.5)
    assert coefs == []
    err2, _ = best_weighted_l2(-0.5, 1)
    assert err2 == pytest.approx(0.10666666666, rel=1e-8)


def test_weighted_l2_refuses_ill_conditioned():
    with pytest.raises(ConditioningError):
        best_weighted_l2(-0.5, 13)
    with pytest.raises(ValueError):
        best_weighted_l2(0.0, 2)
