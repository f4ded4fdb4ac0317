import math

import numpy as np
import pytest

import pymice


def test_step_size():
    assert pymice.step_size_strongly_convex(100.0, 1.0, 1.0) == pytest.approx(2.0 / 202.0)
    with pytest.raises(pymice.MiceError):
        pymice.step_size_strongly_convex(1.0, 0.0, 1.0)


def test_config_defaults_and_validation():
    cfg = pymice.MiceConfig()
    assert cfg.delta_drop == 0.5
    assert cfg.m_min == 5
    cfg.clipping = "B"
    assert cfg.clipping == "B"
    cfg.eps = -1.0
    with pytest.raises(pymice.MiceError):
        cfg.validate()


def test_quadratic_problem():
    q = pymice.QuadraticProblem(10.0)
    assert q.dimension == 2
    x = q.optimum_point()
    assert np.linalg.norm(q.true_gradient(x)) < 1e-10
    assert q.true_objective(q.default_start()) > q.true_objective(x)


def test_estimator_first_call_is_restart():
    q = pymice.QuadraticProblem(100.0)
    cfg = pymice.MiceConfig()
    est = pymice.MiceEstimator(q, cfg, seed=3)
    rep = est.estimate(q.default_start())
    assert rep["action"] == "restarted"
    assert rep["hierarchy_len"] == 1
    assert est.gradient_evals == rep["new_gradient_evals"] >= 50
    exact = q.true_gradient(q.default_start())
    assert np.linalg.norm(rep["gradient"] - exact) < np.linalg.norm(exact)


def test_estimator_dimension_mismatch():
    est = pymice.MiceEstimator(pymice.QuadraticProblem(10.0), pymice.MiceConfig())
    with pytest.raises(pymice.MiceError):
        est.estimate(np.zeros(3))


def test_run_config_reproducible():
    cfg = {
        "problem": "quadratic",
        "problem.kappa": "10",
        "method": "sgd_mice",
        "stop.max_iters": "50",
        "seed": "4",
        "record_time": "false",
    }
    a = pymice.run_config(cfg)
    b = pymice.run_config(cfg)
    assert len(a) == 51
    assert [r["opt_gap"] for r in a] == [r["opt_gap"] for r in b]
    assert a[-1]["action"] == "end"
    assert a[-1]["opt_gap"] < a[0]["opt_gap"]
    assert all(not math.isnan(r["opt_gap"]) for r in a)


def test_run_config_rejects_unknown_key():
    with pytest.raises(pymice.MiceError, match="CONFIG|config"):
        pymice.run_config({"problem": "quadratic", "stop.max_iters": "5", "bogus": "1"})
