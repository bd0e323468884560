import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pielm.basis import init_basis
from pielm.cases import case1, case2, case4
from pielm.config import make_config
from pielm.evaluation import (
    boundary_trace,
    build_test_grid,
    evaluate_field,
    predict,
    relative_l2,
    robustness_trial,
)
from pielm.geometry import PHASE2, classify


def test_relative_l2_examples():
    assert relative_l2([3.0, 4.0], [3.0, 0.0]) == pytest.approx(0.8, rel=1e-15)
    assert relative_l2([1.0, -2.0, 5.0], [0.0, 0.0, 0.0]) == 1.0
    assert relative_l2([1.0, 2.0], [1.0, 2.0]) == 0.0


def test_relative_l2_errors():
    with pytest.raises(ValueError):
        relative_l2([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        relative_l2([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        relative_l2([], [])


vectors = st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30)


@settings(max_examples=100, deadline=None)
@given(v=vectors, c=st.floats(1e-3, 1e3), seed=st.integers(0, 1000))
def test_relative_l2_scale_invariant(v, c, seed):
    e = np.asarray(v)
    if np.linalg.norm(e) < 1e-6:
        return
    p = e + np.random.default_rng(seed).normal(size=e.size)
    assert relative_l2(c * e, c * p) == pytest.approx(relative_l2(e, p), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(v=vectors, seed=st.integers(0, 1000), a=st.floats(0, 1), b=st.floats(0, 1))
def test_relative_l2_monotone_in_error_size(v, seed, a, b):
    e = np.asarray(v)
    if np.linalg.norm(e) < 1e-6:
        return
    d = np.random.default_rng(seed).normal(size=e.size)
    lo, hi = sorted((a, b))
    assert relative_l2(e, e + lo * d) <= relative_l2(e, e + hi * d) * (1 + 1e-12) + 1e-300


def test_zero_weights_give_unit_error():
    c = case2()
    basis = init_basis(2, 10, 0)
    ev = evaluate_field(c, basis, np.zeros(20), 30, 30)
    assert ev.aggregate == 1.0
    assert ev.per_field == [1.0, 1.0]


def test_theta_shape_checked():
    with pytest.raises(ValueError):
        evaluate_field(case1(), init_basis(2, 10, 0), np.zeros(11))


def test_test_grid_respects_phase():
    c = case2()
    pts = build_test_grid(c, 0, 40, 40)
    assert not np.any(classify(c.boundary, pts) == PHASE2)
    assert pts.shape[1] == 2
    g4 = build_test_grid(case4(), 1, 8, 5)
    assert g4.shape[1] == 3


def test_predict_is_chunk_independent(monkeypatch):
    import pielm.evaluation as ev

    basis = init_basis(3, 12, 2)
    w = np.random.default_rng(0).normal(size=12)
    pts = np.random.default_rng(1).uniform(0, 1, (1000, 3))
    full = predict(basis, w, pts, (0, 0, 1))
    monkeypatch.setattr(ev, "CHUNK", 7)
    np.testing.assert_allclose(predict(basis, w, pts, (0, 0, 1)), full, rtol=0, atol=1e-15)


def test_trace_exact_values():
    c1 = case1()
    basis = init_basis(2, 5, 0)
    tr = boundary_trace(c1, basis, np.zeros(5), "u(0,t)", 11)
    assert tr.exact[0] == -0.5 and tr.t[0] == 0.0 and np.all(tr.coord == 0.0)
    tr = boundary_trace(c1, basis, np.zeros(5), "u_x(0,t)", 11)
    np.testing.assert_array_equal(tr.exact, 2.0)
    tr = boundary_trace(case2(), basis, np.zeros(10), "u2(2,t)", 11)
    assert tr.exact[-1] == pytest.approx(-0.3934693402873666, rel=1e-15)  # e^{-1/2} - 1


def test_unknown_trace_raises():
    with pytest.raises(KeyError):
        boundary_trace(case1(), init_basis(2, 5, 0), np.zeros(5), "u(2,t)")


def test_robustness_trial_deterministic():
    cfg = make_config(case=1, M=40, nc=30, ni=20, grid=20, grid_t=20)
    a = robustness_trial(cfg, [1, 2, 3])
    b = robustness_trial(cfg, [1, 2, 3])
    assert a.l2 == b.l2
    assert a.min <= a.median <= a.max
    assert a.as_dict()["n_success"] == 3
    with pytest.raises(ValueError):
        robustness_trial(cfg, [1])


def test_robustness_trial_records_failures(monkeypatch):
    import pielm.pipeline as pipeline

    real = pipeline.solve_case

    def flaky(config, case=None):
        if config.seed == 2:
            raise ArithmeticError("boom")
        return real(config, case)

    monkeypatch.setattr(pipeline, "solve_case", flaky)
    stats = robustness_trial(make_config(case=1, M=20, nc=20, ni=10, grid=10, grid_t=10), [1, 2, 3])
    assert stats.l2[1] is None and "boom" in stats.failures[2]
    assert stats.as_dict()["n_success"] == 2
