/*
 * Copyright 2026 The graphgp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>

#include "doctest.h"
#include "graphgp/error.hpp"
#include "graphgp/gp_engine.hpp"
#include "graphgp/random.hpp"
#include "helpers.hpp"

using namespace graphgp;
using graphgp::testing::gaussian;
using graphgp::testing::max_abs;
using graphgp::testing::random_psd;
using graphgp::testing::relative_error;

namespace {

const double kLog2Pi = std::log(2.0 * M_PI);

Eigen::MatrixXd naive_kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

KroneckerSystem system_of(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram, double noise) {
  return KroneckerSystem(symmetric_eigen(k), symmetric_eigen(gram), noise);
}

double gaussian_log_density(const Eigen::VectorXd& y, const Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd inv = cov.inverse();
  return -0.5 * std::log(cov.determinant()) - 0.5 * y.dot(inv * y) -
         0.5 * static_cast<double>(y.size()) * kLog2Pi;
}

Graph sensor(std::uint64_t seed, int m = 12) {
  return random_graph({RandomGraphKind::sensor, m, 4}, seed);
}

}  // namespace

TEST_SUITE("gp_engine") {
  TEST_CASE("full covariance examples") {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    const Eigen::MatrixXd expected = 1.1 * Eigen::MatrixXd::Identity(2, 2);
    CHECK(max_abs(full_covariance(one, Eigen::MatrixXd::Identity(2, 2), 0.1) - expected) < 1e-15);
    CHECK(max_abs(full_covariance(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(2, 2), 0.0) -
                  Eigen::MatrixXd::Identity(6, 6)) == 0.0);
    auto rng = make_stream(1);
    const Eigen::MatrixXd k = random_psd(2, rng), g = random_psd(2, rng);
    const Eigen::MatrixXd expected_kron =
        naive_kron(k, g) + 0.3 * Eigen::MatrixXd::Identity(4, 4);
    CHECK(max_abs(full_covariance(k, g, 0.3) - expected_kron) < 1e-15);
    CHECK_THROWS_AS(full_covariance(Eigen::MatrixXd::Ones(2, 3), g, 0.1), ValidationError);
  }

  TEST_CASE("vectorization is node-fastest") {
    Eigen::MatrixXd y(2, 3);
    y << 1, 2, 3, 4, 5, 6;
    const Eigen::VectorXd v = vectorize(y);
    for (int i = 0; i < 6; ++i) CHECK(v(i) == i + 1);
    CHECK(max_abs(unvectorize(v, 2, 3) - y) == 0.0);
    CHECK_THROWS_AS(unvectorize(v, 4, 3), ValidationError);
  }

  TEST_CASE("scalar likelihood examples") {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
    CHECK(system_of(one, one, 0.0).log_likelihood(zero) == doctest::Approx(-0.918939).epsilon(1e-6));
    CHECK(dense_log_marginal_likelihood(one, one, 0.0, Eigen::VectorXd::Zero(1)) ==
          doctest::Approx(-0.5 * kLog2Pi));
    const double s = 2.5, yv = 1.3;
    Eigen::MatrixXd y(1, 1);
    y << yv;
    const double expected = -0.5 * std::log(s) - yv * yv / (2 * s) - 0.5 * kLog2Pi;
    CHECK(system_of(2.0 * one, one, 0.5).log_likelihood(y) == doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("fast likelihood equals dense Cholesky evaluation") {
    auto rng = make_stream(2);
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXd k = random_psd(3, rng), g = random_psd(5, rng);
      const Eigen::MatrixXd y = gaussian(3, 5, rng);
      const double fast = system_of(k, g, 0.2).log_likelihood(y);
      const double dense = dense_log_marginal_likelihood(k, g, 0.2, vectorize(y));
      CHECK(relative_error(fast, dense) <= 1e-8);
    }
  }

  TEST_CASE("Kronecker solve and log-determinant") {
    auto rng = make_stream(3);
    const Eigen::VectorXd v = gaussian(12, 1, rng);
    SolveResult r = kron_solve_and_logdet(Eigen::MatrixXd::Identity(3, 3),
                                          Eigen::MatrixXd::Identity(4, 4), 1.0, v);
    CHECK(max_abs(r.solution - v / 2.0) < 1e-14);
    CHECK(r.log_det == doctest::Approx(12 * std::log(2.0)));

    const Eigen::MatrixXd k4 = random_psd(3, rng), g4 = random_psd(4, rng);
    const double big = 1e8;
    r = kron_solve_and_logdet(k4, g4, big, v);
    CHECK((r.solution * big - v).norm() / v.norm() < 1e-6);

    const Eigen::MatrixXd k = random_psd(4, rng), g = random_psd(6, rng);
    const Eigen::VectorXd w = gaussian(24, 1, rng);
    r = kron_solve_and_logdet(k, g, 0.15, w);
    const Eigen::MatrixXd sigma = full_covariance(k, g, 0.15);
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    const Eigen::VectorXd dense = llt.solve(w);
    CHECK((r.solution - dense).norm() / dense.norm() <= 1e-8);
    const double logdet = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    CHECK(relative_error(r.log_det, logdet) <= 1e-8);
  }

  TEST_CASE("posterior matches dense Gaussian conditioning") {
    auto rng = make_stream(4);
    const Eigen::Index n = 3, m = 4, nt = 2;
    const Eigen::MatrixXd kall = random_psd(n + nt, rng);
    const Eigen::MatrixXd k = kall.topLeftCorner(n, n);
    const Eigen::MatrixXd cross = kall.topRightCorner(n, nt);
    const Eigen::VectorXd prior = kall.bottomRightCorner(nt, nt).diagonal();
    const Eigen::MatrixXd g = random_psd(m, rng);
    const double noise = 0.25;
    const Eigen::MatrixXd y = gaussian(n, m, rng);
    const Posterior post = posterior_predict(system_of(k, g, noise), y, cross, prior);

    const Eigen::MatrixXd sigma = full_covariance(k, g, noise);
    const Eigen::MatrixXd sigma_inv = sigma.inverse();
    for (Eigen::Index t = 0; t < nt; ++t) {
      const Eigen::MatrixXd c = naive_kron(cross.col(t).transpose(), g);  // M x NM
      const Eigen::VectorXd mean = c * sigma_inv * vectorize(y);
      const Eigen::MatrixXd cov = prior(t) * g - c * sigma_inv * c.transpose() +
                                  noise * Eigen::MatrixXd::Identity(m, m);
      CHECK((post.mean.row(t).transpose() - mean).norm() / mean.norm() <= 1e-7);
      CHECK((post.covariance[static_cast<std::size_t>(t)] - cov).norm() / cov.norm() <= 1e-7);
    }
  }

  TEST_CASE("noiseless interpolation and prior reversion") {
    const Graph graph = sensor(5);
    const GraphContext ctx(graph);
    auto rng = make_stream(5);
    TrainingSet data{gaussian(4, 2, rng), gaussian(4, 12, rng)};
    Hyperparameters h{PolynomialGraphFilter{1.0, -0.5}, InputKernelConfig::squared_exponential(0.5, 1.0),
                      1e-10};
    Posterior post = posterior_predict(h, data, ctx, data.inputs.topRows(1));
    CHECK(max_abs(post.mean.row(0) - data.signals.row(0)) <= 1e-4);

    h.noise_variance = 0.3;
    Eigen::MatrixXd far = Eigen::MatrixXd::Constant(1, 2, 1e6);
    post = posterior_predict(h, data, ctx, far);
    CHECK(max_abs(post.mean) < 1e-12);
    const Eigen::MatrixXd expected =
        ctx.output_gram(h.output) + 0.3 * Eigen::MatrixXd::Identity(12, 12);
    CHECK(max_abs(post.covariance[0] - expected) < 1e-12);
  }

  TEST_CASE("posterior covariances are symmetric PSD") {
    const Graph graph = sensor(6);
    const GraphContext ctx(graph);
    auto rng = make_stream(6);
    TrainingSet data{gaussian(6, 1, rng), gaussian(6, 12, rng)};
    Hyperparameters h{BaselineGraphKernel{BaselineKind::diffusion, 1.5},
                      InputKernelConfig::squared_exponential(0.7, 2.0), 0.05};
    const Posterior post = posterior_predict(h, data, ctx, gaussian(3, 1, rng));
    for (const auto& c : post.covariance) {
      CHECK(max_abs(c - c.transpose()) == 0.0);
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues().minCoeff() > 0.0);
    }
  }

  TEST_CASE("test log-likelihood") {
    Eigen::VectorXd mu(3);
    mu << 0.1, -2, 5;
    CHECK(test_log_likelihood(mu, Eigen::MatrixXd::Identity(3, 3), mu) ==
          doctest::Approx(-1.5 * kLog2Pi).epsilon(1e-7));
    CHECK(test_log_likelihood(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1),
                              Eigen::VectorXd::Ones(1)) ==
          doctest::Approx(-0.5 - 0.5 * kLog2Pi).epsilon(1e-7));

    auto rng = make_stream(7);
    const Eigen::MatrixXd cov = random_psd(5, rng, 0.5);
    const Eigen::VectorXd m = gaussian(5, 1, rng), y = gaussian(5, 1, rng);
    Eigen::MatrixXd jittered = cov;
    jittered.diagonal().array() += 1e-8 * cov.trace() / 5.0;
    CHECK(std::abs(test_log_likelihood(m, cov, y) - gaussian_log_density(y - m, jittered)) <= 1e-9);
    CHECK_THROWS_AS(test_log_likelihood(m, cov, Eigen::VectorXd::Zero(4)), ValidationError);
  }

  TEST_CASE("ICM column-sum oracle") {
    CHECK(max_abs(icm_gram_oracle(Eigen::MatrixXd::Identity(2, 2)) - Eigen::MatrixXd::Identity(2, 2)) ==
          0.0);
    Eigen::MatrixXd b(2, 2), expected(2, 2);
    b << 1, 1, 0, 1;
    expected << 2, 1, 1, 1;
    CHECK(max_abs(icm_gram_oracle(b) - expected) == 0.0);
    auto rng = make_stream(8);
    const Eigen::MatrixXd r = gaussian(6, 6, rng);
    CHECK(max_abs(icm_gram_oracle(r) - r * r.transpose()) <= 1e-12);
  }

  TEST_CASE("identity filter reduces to independent per-node GPs") {
    const Graph graph = sensor(9);
    const GraphContext ctx(graph);
    auto rng = make_stream(9);
    TrainingSet data{gaussian(5, 2, rng), gaussian(5, 12, rng)};
    const auto input = InputKernelConfig::squared_exponential(0.9, 1.7);
    const Hyperparameters h{PolynomialGraphFilter{1.0}, input, 0.4};
    const Eigen::MatrixXd k = input_kernel_matrix(input, data.inputs, data.inputs) +
                              0.4 * Eigen::MatrixXd::Identity(5, 5);
    double expected = 0.0;
    for (Eigen::Index j = 0; j < 12; ++j) expected += gaussian_log_density(data.signals.col(j), k);
    CHECK(log_marginal_likelihood(h, data, ctx) == doctest::Approx(expected).epsilon(1e-10));
  }

  TEST_CASE("signal-fastest ordering gives the same likelihood") {
    auto rng = make_stream(10);
    const Eigen::MatrixXd k = random_psd(3, rng), g = random_psd(4, rng);
    const Eigen::MatrixXd y = gaussian(3, 4, rng);
    Eigen::VectorXd signal_fastest(12);
    for (int j = 0; j < 4; ++j)
      for (int n = 0; n < 3; ++n) signal_fastest(j * 3 + n) = y(n, j);
    const double node_fastest = dense_log_marginal_likelihood(k, g, 0.2, vectorize(y));
    const double transposed = dense_log_marginal_likelihood(g, k, 0.2, signal_fastest);
    CHECK(node_fastest == doctest::Approx(transposed).epsilon(1e-12));
    CHECK(system_of(k, g, 0.2).log_likelihood(y) == doctest::Approx(node_fastest).epsilon(1e-10));
  }

  TEST_CASE("hyperparameter and data validation") {
    const Graph graph = sensor(11);
    const GraphContext ctx(graph);
    auto rng = make_stream(11);
    TrainingSet data{gaussian(3, 1, rng), gaussian(3, 12, rng)};
    Hyperparameters h{PolynomialGraphFilter{1.0}, InputKernelConfig::squared_exponential(1.0, 1.0), 0.0};
    CHECK_THROWS_AS(log_marginal_likelihood(h, data, ctx), ValidationError);
    h.noise_variance = 0.1;
    TrainingSet wrong{gaussian(3, 1, rng), gaussian(3, 11, rng)};
    CHECK_THROWS_AS(log_marginal_likelihood(h, wrong, ctx), ValidationError);
    TrainingSet rows{gaussian(2, 1, rng), gaussian(3, 12, rng)};
    CHECK_THROWS_AS(log_marginal_likelihood(h, rows, ctx), ValidationError);
    data.signals(0, 0) = NAN;
    CHECK_THROWS_AS(log_marginal_likelihood(h, data, ctx), ValidationError);
    CHECK_FALSE(h.describe().empty());
  }
}
