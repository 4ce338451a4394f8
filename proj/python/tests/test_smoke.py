import math

import numpy as np
import pytest

import delasso


def make_problem(n=80, p=20, s0=3, sigma=0.5, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    theta = np.zeros(p)
    theta[:s0] = 1.5
    Y = X @ theta + sigma * rng.standard_normal(n)
    return X, Y, theta


def test_lasso_kkt():
    X, Y, _ = make_problem()
    out = delasso.lasso(X, Y, 0.1)
    assert out["converged"]
    assert out["max_kkt_violation"] <= 1e-6
    assert len(out["theta_hat"]) == 20


def test_lasso_zero_at_lambda_max():
    X, Y, _ = make_problem()
    lam_max = np.abs(X.T @ Y / len(Y)).max()
    out = delasso.lasso(X, Y, lam_max * 1.01)
    assert np.all(out["theta_hat"] == 0.0)


def test_fit_detects_strong_signals():
    X, Y, theta = make_problem()
    out = delasso.fit(X, Y, alpha=0.05, sigma_source="known", known_sigma=0.5)
    decisions = np.asarray(out["decisions"])
    assert decisions[:3].all()
    assert np.all(out["ci_lower"] <= out["ci_upper"])
    # duality between tests and intervals
    rejected = (np.asarray(out["ci_lower"]) > 0) | (np.asarray(out["ci_upper"]) < 0)
    assert np.array_equal(rejected, decisions.astype(bool))


def test_scaled_lasso_sigma():
    X, Y, _ = make_problem(n=400, p=40, s0=2, sigma=1.0, seed=3)
    out = delasso.scaled_lasso(X, Y, math.sqrt(2 * math.log(40) / 400))
    assert out["converged"]
    assert 0.7 < out["sigma_hat"] < 1.3


def test_nodewise_precision_shape():
    X, _, _ = make_problem(n=100, p=15)
    omega = delasso.nodewise_precision(X, 0.2)
    assert omega.shape == (15, 15)
    sigma_hat = X.T @ X / 100
    assert np.allclose(np.diag(omega @ sigma_hat), 1.0)


def test_simulate_deterministic():
    kwargs = dict(
        n=60, p=40, s0=4, theta_value=1.0, sigma=1.0, replications=2, seed=11,
        sigma_source="known", known_sigma=1.0,
    )
    a = delasso.simulate(**kwargs)
    b = delasso.simulate(**kwargs)
    assert a["json"] == b["json"]
    assert a["failed_replications"] == 0
    assert len(a["per_replication"]) == 2


def test_scalar_helpers():
    assert delasso.std_normal_cdf(0.0) == 0.5
    assert abs(delasso.std_normal_quantile(0.975) - 1.959963984540054) < 1e-9
    assert abs(delasso.power_function(0.05, 0.0) - 0.05) < 1e-12
    assert abs(delasso.infty_k_norm(np.array([3.0, 1.0, 1.0, 1.0]), 1) - 3.0) < 1e-14


def test_errors_surface_as_python_exceptions():
    X, Y, _ = make_problem()
    with pytest.raises(ValueError):
        delasso.lasso(X, Y, -1.0)
    with pytest.raises(ValueError):
        delasso.std_normal_quantile(2.0)
    with pytest.raises(ValueError):
        delasso.fit(X, Y, alpha=0.05, precision="bogus")
