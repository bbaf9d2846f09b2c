# Copyright 2026 The graphgp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import graphgp


def path_adjacency():
    return np.array([[0.0, 1.0], [1.0, 0.0]])


def test_two_node_laplacians():
    a = path_adjacency()
    np.testing.assert_allclose(graphgp.laplacian(a), [[1, -1], [-1, 1]])
    np.testing.assert_allclose(graphgp.laplacian(a, "scaled"), [[0.5, -0.5], [-0.5, 0.5]])
    lam, u = graphgp.eigendecompose(a, "combinatorial")
    np.testing.assert_allclose(lam, [0.0, 2.0], atol=1e-12)
    np.testing.assert_allclose(u.T @ u, np.eye(2), atol=1e-12)


def test_invalid_graph_raises_value_error():
    with pytest.raises(ValueError):
        graphgp.laplacian(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_sensor_graph_is_deterministic():
    a = graphgp.random_graph("sensor", 30, seed=3)
    b = graphgp.random_graph("sensor", 30, seed=3)
    assert a.shape == (30, 30)
    np.testing.assert_array_equal(a, b)
    lam, _ = graphgp.eigendecompose(a, "scaled")
    assert abs(lam[0]) < 1e-8 and abs(lam[-1] - 1.0) < 1e-8


def test_likelihood_matches_dense_formula():
    rng = np.random.default_rng(0)
    a = graphgp.random_graph("sensor", 8, seed=1)
    y = rng.normal(size=(3, 8))
    beta = np.array([1.0, -0.5])
    noise = 0.2
    ll = graphgp.log_marginal_likelihood(a, beta, y, noise)

    lam, u = graphgp.eigendecompose(a, "scaled")
    b = u @ np.diag(beta[0] + beta[1] * lam) @ u.T
    cov = np.kron(np.eye(3), b @ b.T) + noise * np.eye(24)
    v = y.reshape(-1)
    _, logdet = np.linalg.slogdet(cov)
    expected = -0.5 * (v @ np.linalg.solve(cov, v) + logdet + 24 * math.log(2 * math.pi))
    assert ll == pytest.approx(expected, rel=1e-10)


def test_constrained_fit_returns_feasible_spectrum():
    a = graphgp.random_graph("sensor", 30, seed=0)
    ds = graphgp.generate_filtered_signals(a, "lowpass-taylor", 30, 10.0, seed=0)
    fit = graphgp.fit_polynomial(a, ds["signals"], degree=2, max_outer_iterations=200)
    assert fit["feasible"]
    assert fit["min_spectrum"] >= -1e-8
    assert np.isfinite(fit["log_likelihood"])
    rows = graphgp.spectrum(a, fit["beta"], 0.01)
    assert rows.shape == (101 + 30, 4)
    assert rows[:, 2].max() <= 1.0 + 1e-12


def test_posterior_with_coupled_inputs():
    a = graphgp.random_graph("sensor", 10, seed=2)
    ds = graphgp.generate_wishart_dataset(a, "bandpass", 6, seed=2, snr_db=10.0)
    idx = ds["inputs"]
    mean, covs = graphgp.posterior_predict(
        a, np.array([0.0, 1.0, 4.0, 1.0, -6.0]), ds["signals"][:4], 0.1,
        idx[:4], idx[4:], covariance=ds["input_covariance"])
    assert mean.shape == (2, 10)
    assert len(covs) == 2
    for c in covs:
        np.testing.assert_allclose(c, c.T, atol=1e-12)
        assert np.linalg.eigvalsh(c).min() > 0
