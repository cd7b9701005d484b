import math

import numpy as np
import pytest

import streampca as sp

TOP_GAP = [0.9] * 9 + [1.0]


def test_sym_eigen_matches_numpy():
    rng = np.random.default_rng(0)
    for d in (2, 5, 9):
        a = rng.uniform(-1, 1, (d, d))
        m = (a + a.T) / 2
        values, vectors = sp.sym_eigen(m.tolist())
        ref_values, ref_vectors = np.linalg.eigh(m)
        assert np.allclose(values, ref_values, atol=1e-10)
        for j in range(d):
            assert abs(abs(np.dot(vectors[j], ref_vectors[:, j])) - 1) < 1e-8


def test_covariance_model():
    model = sp.make_covariance(TOP_GAP, 3)
    sigma = np.array(model.sigma)
    assert np.allclose(sigma, sigma.T)
    assert np.allclose(np.linalg.eigvalsh(sigma), TOP_GAP, atol=1e-12)
    assert model.dim == 10
    assert model.gap_max == pytest.approx(0.1, abs=1e-12)
    top = np.array(model.eigenvector(9))
    assert np.allclose(sigma @ top, top, atol=1e-12)
    assert sp.fourth_moment_gaussian(model) == pytest.approx(99.39, rel=1e-14)


def test_krasulina_update_matches_direct_formula():
    rng = np.random.default_rng(1)
    schedule = sp.Schedule(c=0.7, alpha=1.0, n0=3)
    for _ in range(50):
        x = rng.normal(size=6)
        v = rng.normal(size=6)
        p = x @ v
        expected_xi = p * x - p * p / (v @ v) * v
        assert np.allclose(sp.krasulina_xi(x.tolist(), v.tolist()), expected_xi, atol=1e-12)

        state, xi, gamma = sp.krasulina_step_min(sp.State(v.tolist(), step=4), x.tolist(), schedule)
        assert gamma == pytest.approx(0.7 / (5 + 3))
        assert np.allclose(state.v, v - gamma * expected_xi, atol=1e-12)
        assert state.step == 5
        assert abs(np.dot(xi, v)) <= 1e-9 * np.linalg.norm(xi) * np.linalg.norm(v)

        state, _, gamma = sp.krasulina_step_max(sp.State(v.tolist(), step=4), x.tolist(), schedule)
        assert np.allclose(state.v, v + gamma * expected_xi, atol=1e-12)


def test_oja_and_ccipca():
    schedule = sp.Schedule()
    state = sp.oja_step(sp.State([3.0, 4.0]), [1.0, 2.0], schedule)
    assert math.isclose(np.linalg.norm(state.v), 1.0, rel_tol=1e-14)
    state = sp.ccipca_step(sp.State([1.0, 0.0], step=1), [1.0, 0.0])
    assert state.v[1] == 0.0


def test_metrics():
    h = 1 / math.sqrt(2)
    assert sp.alignment_loss([h, h], [1.0, 0.0]) == pytest.approx(0.5)
    model = sp.make_covariance([0.1, 0.7, 2.0, 5.0], 4)
    sigma = np.array(model.sigma)
    v = np.array([0.3, -1.0, 0.2, 0.5])
    mu = v @ sigma @ v / (v @ v)
    f = (sigma @ v) @ (sigma @ v) / (v @ v) - mu * mu
    assert sp.f_value(model, v.tolist()) == pytest.approx(f, rel=1e-12)

    top = sp.make_covariance(TOP_GAP, 0)
    bound = sp.theoretical_bound(top, 10**6, 9.1**2, kind="alignment", which="largest")
    assert bound == pytest.approx(0.091, rel=1e-12)


def test_fixed_dataset_spectrum():
    model = sp.make_covariance(TOP_GAP, 2)
    x = np.array(sp.build_fixed_dataset(model, 500, 2))
    assert x.shape == (500, 10)
    assert np.allclose(np.linalg.eigvalsh(x.T @ x / 500), TOP_GAP, atol=1e-8)
    assert np.allclose(sp.sample_covariance(x.tolist()), x.T @ x / 500, atol=1e-12)


def test_fit_rate_slope():
    n = [100 * 2**k for k in range(10)]
    fit = sp.fit_rate_slope(n, [3 * m**-0.5 for m in n])
    assert fit["slope"] == pytest.approx(-0.5, abs=1e-12)
    assert fit["points_used"] == 10
    with pytest.raises(sp.StreamPcaError):
        sp.fit_rate_slope([1, 2], [1, 1])


def test_run_experiment():
    config = {
        "scheme": "krasulina",
        "variant": "smallest",
        "spectrum": "smallest-id",
        "n_total": 2000,
        "replicates": 3,
        "seed": 1,
    }
    out = sp.run_experiment(config)
    assert out["curve"][-1]["n"] == 2000
    assert all(p["mean_align_loss"] >= 0 for p in out["curve"])
    assert out["config"]["replicates"] == 3
    assert sp.run_experiment(config) == out

    with pytest.raises(sp.StreamPcaError, match="DegenerateGap"):
        sp.run_experiment(dict(config, spectrum="paper4"))
