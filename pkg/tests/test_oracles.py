import math

import numpy as np
import pytest

from lblab.instances import fsm_instance, rlm_instance, toy_instance
from lblab.oracles import (CallLog, DualExactCD, DualGradStep,
                           DualNumericEngine, FirstOrder, NumericEngine,
                           SteepestCD, answer)

L, MU, R = 100.0, 1.0, 1.0


def fsm_engine(seed=0, n=8, d=4):
    rng = np.random.default_rng(seed)
    etas = rng.uniform(-(L - MU) / 2, (L - MU) / 2, size=n)
    return NumericEngine(fsm_instance(etas, L, MU, R, d))


def test_first_order_raw_gradient():
    eng = fsm_engine()
    w = np.array([0.1, -0.3, 0.2, 0.0])
    out = answer(eng, w, FirstOrder(a=1.0, b=0.0, j=3))
    assert np.allclose(out, eng.instance.comp_grad(3, w))


def test_first_order_gd_step_shape():
    # a = -gamma, b = 1 is one gradient-descent step on component j
    eng = NumericEngine(toy_instance(4.0, 1.0, 10.0))
    w = np.array([2.0])
    out = answer(eng, w, FirstOrder(a=-0.1, b=1.0, j=0))
    assert out == pytest.approx([2.0 - 0.1 * (4.0 * 2.0 - 1.0)])


def test_first_order_identity_and_offset():
    eng = fsm_engine()
    w = np.array([0.5, 0.5, 0.0, 0.0])
    assert np.allclose(answer(eng, w, FirstOrder(a=0.0, b=1.0, j=0)), w)
    c = np.ones(4)
    out = answer(eng, w, FirstOrder(a=0.0, b=0.0, j=0, c=c))
    assert np.allclose(out, c)


def test_steepest_cd_zeroes_partial():
    eng = fsm_engine(seed=5)
    w = np.array([1.0, -2.0, 0.5, 0.3])
    for j in range(8):
        for i in range(4):
            out = answer(eng, w, SteepestCD(i=i, j=j))
            assert abs(eng.grad_entry(j, i, out)) <= 1e-12
            # only coordinate i moved
            mask = np.arange(4) != i
            assert np.all(out[mask] == w[mask])


def test_steepest_cd_closed_form():
    # t = -(partial_i f_j)(w) / Q_jii
    eng = fsm_engine(seed=6)
    w = np.array([0.2, 0.4, -0.1, 0.9])
    j, i = 2, 1
    out = answer(eng, w, SteepestCD(i=i, j=j))
    t = -eng.grad_entry(j, i, w) / eng.diag(j, i)
    assert out[i] == pytest.approx(w[i] + t, rel=1e-14)


def test_dual_grad_step_zero_t_is_identity():
    inst = rlm_instance(np.linspace(-1.0, 1.0, 4), 0.05, 8)
    eng = DualNumericEngine(inst)
    a = np.full(8, 0.3)
    out = answer(eng, a, DualGradStep(t=0.0, j=5))
    assert np.allclose(out, a)


def test_dual_exact_cd_zeroes_partial():
    inst = rlm_instance(np.linspace(-1.0, 1.0, 4), 0.05, 8)
    eng = DualNumericEngine(inst)
    rng = np.random.default_rng(7)
    a = rng.normal(size=8)
    for j in range(8):
        out = answer(eng, a, DualExactCD(j=j))
        assert abs(inst.dual_grad(out)[j]) <= 1e-14


def test_dual_exact_cd_from_zero_diagonal_case():
    # psi = 0 decouples the pairs: from 0 the step lands at (1/n)/Q_jj
    n, lam = 8, 0.05
    inst = rlm_instance(np.zeros(n // 2), lam, n)
    eng = DualNumericEngine(inst)
    out = answer(eng, np.zeros(n), DualExactCD(j=2))
    expect = (1.0 / n) / ((1 + 1 / (lam * n)) / n)
    assert out[2] == pytest.approx(expect, rel=1e-14)
    assert np.all(out[np.arange(n) != 2] == 0)


def test_call_log_accounting():
    eng = fsm_engine()
    log = CallLog()
    w = np.zeros(4)
    for j in (0, 0, 3):
        w = answer(eng, w, FirstOrder(a=-0.001, b=1.0, j=j), log)
    w = answer(eng, w, SteepestCD(i=0, j=1), log)
    assert log.total == 4
    assert log.variant_counts["FirstOrder"] == 3
    assert log.variant_counts["SteepestCD"] == 1
    assert log.component_touches[0] == 2
    assert log.component_touches[1] == 1
    assert log.component_touches[3] == 1


def test_call_log_csv():
    log = CallLog()
    eng = fsm_engine()
    answer(eng, np.zeros(4), FirstOrder(a=1.0, b=0.0, j=2), log)
    csv = log.to_csv()
    assert "variant,count" in csv
    assert "FirstOrder,1" in csv
    assert "2,1" in csv


def test_call_log_query_recording():
    log = CallLog()
    log.record_queries = True
    eng = fsm_engine()
    q = FirstOrder(a=1.0, b=0.0, j=2)
    answer(eng, np.zeros(4), q, log)
    assert log.queries == [q]


def test_unknown_query_rejected():
    eng = fsm_engine()
    with pytest.raises(TypeError):
        answer(eng, np.zeros(4), object())
