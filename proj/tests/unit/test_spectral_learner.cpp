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
#include "graphgp/random.hpp"
#include "graphgp/spectral_learner.hpp"
#include "graphgp/synth.hpp"
#include "helpers.hpp"

using namespace graphgp;
using graphgp::testing::gaussian;
using graphgp::testing::scaled_sup_distance;

namespace {

Graph sensor(std::uint64_t seed, int m = 6) {
  return random_graph({RandomGraphKind::sensor, m, 3}, seed);
}

Graph sensor30(std::uint64_t seed) { return random_graph({RandomGraphKind::sensor, 30, 6}, seed); }

TrainingSet synthetic(const Graph& g, const GroundTruthFilter& truth, int n, std::uint64_t seed) {
  const SyntheticDataset ds = generate_filtered_signals(g, truth, n, 10.0, seed);
  return {ds.inputs, ds.signals};
}

double nll(const Hyperparameters& h, const TrainingSet& data, const GraphContext& ctx) {
  return -log_marginal_likelihood(h, data, ctx);
}

double softplus(double x) { return std::log1p(std::exp(x)); }
double softplus_inverse(double y) { return std::log(std::expm1(y)); }

// Central difference of -l along one coordinate; `set` writes the coordinate.
template <typename Setter>
double central_difference(Hyperparameters h, double x0, const TrainingSet& data,
                          const GraphContext& ctx, Setter set, double step = 1e-5) {
  Hyperparameters plus = h, minus = h;
  set(plus, x0 + step);
  set(minus, x0 - step);
  return (nll(plus, data, ctx) - nll(minus, data, ctx)) / (2 * step);
}

void check_close(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-2});
  CHECK(std::abs(analytic - numeric) / scale <= 1e-4);
}

}  // namespace

TEST_SUITE("spectral_learner") {
  TEST_CASE("polynomial gradient matches central differences") {
    auto rng = make_stream(100);
    for (int trial = 0; trial < 6; ++trial) {
      const Graph g = sensor(trial);
      const GraphContext ctx(g);
      const TrainingSet data{gaussian(4, 2, rng), gaussian(4, 6, rng)};
      const int p = 1 + trial % 3;
      Hyperparameters h{PolynomialGraphFilter(Eigen::VectorXd(gaussian(p + 1, 1, rng))),
                        InputKernelConfig::squared_exponential(
                            graphgp::testing::uniform(0.5, 2.0, rng), 1.0),
                        graphgp::testing::uniform(0.05, 0.5, rng)};
      const HyperGradient grad = nll_gradient(h, data, ctx);
      const Eigen::VectorXd beta = h.polynomial().coefficients();
      for (int i = 0; i <= p; ++i) {
        const double fd = central_difference(h, beta(i), data, ctx, [&](Hyperparameters& x, double v) {
          Eigen::VectorXd b = beta;
          b(i) = v;
          x.output = PolynomialGraphFilter(b);
        });
        check_close(grad.beta(i), fd);
      }
      check_close(grad.log_noise,
                  central_difference(h, std::log(h.noise_variance), data, ctx,
                                     [](Hyperparameters& x, double v) { x.noise_variance = std::exp(v); }));
      check_close(grad.log_lengthscale,
                  central_difference(h, std::log(h.input.lengthscale), data, ctx,
                                     [](Hyperparameters& x, double v) { x.input.lengthscale = std::exp(v); }));
    }
  }

  TEST_CASE("baseline gradient matches central differences") {
    auto rng = make_stream(101);
    const Graph g = sensor(7);
    const GraphContext ctx(g);
    const TrainingSet data{gaussian(4, 1, rng), gaussian(4, 6, rng)};
    const double lmax = ctx.baselines().normalized_lambda_max();
    for (auto kind : all_baseline_kinds()) {
      CAPTURE(to_string(kind));
      BaselineGraphKernel b{kind, kind == BaselineKind::p_step_random_walk ? lmax + 0.7 : 0.8, 2};
      Hyperparameters h{b, InputKernelConfig::squared_exponential(0.9, 1.4), 0.2};
      const HyperGradient grad = nll_gradient(h, data, ctx);
      check_close(grad.log_variance,
                  central_difference(h, std::log(1.4), data, ctx,
                                     [](Hyperparameters& x, double v) { x.input.variance = std::exp(v); }));
      check_close(grad.log_noise,
                  central_difference(h, std::log(0.2), data, ctx,
                                     [](Hyperparameters& x, double v) { x.noise_variance = std::exp(v); }));
      check_close(grad.log_lengthscale,
                  central_difference(h, std::log(0.9), data, ctx,
                                     [](Hyperparameters& x, double v) { x.input.lengthscale = std::exp(v); }));
      if (!uses_alpha(kind)) {
        CHECK(grad.alpha == 0.0);
        continue;
      }
      if (kind == BaselineKind::p_step_random_walk) {
        check_close(grad.alpha, central_difference(h, softplus_inverse(0.7), data, ctx,
                                                   [&](Hyperparameters& x, double v) {
                                                     auto k = b;
                                                     k.alpha = lmax + softplus(v);
                                                     x.output = k;
                                                   }));
      } else {
        check_close(grad.alpha, central_difference(h, std::log(0.8), data, ctx,
                                                   [&](Hyperparameters& x, double v) {
                                                     auto k = b;
                                                     k.alpha = std::exp(v);
                                                     x.output = k;
                                                   }));
      }
    }
  }

  TEST_CASE("precomputed input kernel gradient") {
    auto rng = make_stream(102);
    const Graph g = sensor(8);
    const GraphContext ctx(g);
    const Eigen::MatrixXd c = graphgp::testing::random_psd(5, rng);
    const TrainingSet data{index_inputs(5), gaussian(5, 6, rng)};
    Hyperparameters h{PolynomialGraphFilter{0.8, -0.3, 0.2}, InputKernelConfig::precomputed(c), 0.3};
    const HyperGradient grad = nll_gradient(h, data, ctx);
    check_close(grad.log_noise,
                central_difference(h, std::log(0.3), data, ctx,
                                   [](Hyperparameters& x, double v) { x.noise_variance = std::exp(v); }));
    const Eigen::VectorXd beta = h.polynomial().coefficients();
    for (int i = 0; i < 3; ++i) {
      check_close(grad.beta(i), central_difference(h, beta(i), data, ctx, [&](Hyperparameters& x, double v) {
                    Eigen::VectorXd b = beta;
                    b(i) = v;
                    x.output = PolynomialGraphFilter(b);
                  }));
    }
  }

  TEST_CASE("beta gradient vanishes at a zero spectrum") {
    auto rng = make_stream(103);
    const Graph g = sensor(9);
    const GraphContext ctx(g);
    const TrainingSet data{gaussian(3, 1, rng), gaussian(3, 6, rng)};
    const Hyperparameters h{PolynomialGraphFilter{0.0, 0.0}, InputKernelConfig::squared_exponential(1, 1),
                            0.5};
    CHECK(nll_gradient(h, data, ctx).beta.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("Lagrangian") {
    auto rng = make_stream(104);
    const Graph g = sensor(10);
    const GraphContext ctx(g);
    const TrainingSet data{gaussian(4, 1, rng), gaussian(4, 6, rng)};
    const Eigen::VectorXd beta = Eigen::Vector3d(1.0, -0.4, 0.1);
    const Hyperparameters h{PolynomialGraphFilter(beta), InputKernelConfig::squared_exponential(1, 1), 0.2};
    const double base = nll(h, data, ctx);

    const LagrangeState vanishing{Eigen::VectorXd::Constant(6, -200.0)};
    CHECK(lagrangian(beta, vanishing, h, data, ctx) == doctest::Approx(base).epsilon(1e-12));

    const LagrangeState lagrange{gaussian(6, 1, rng)};
    const Eigen::VectorXd spectrum = vandermonde(ctx.scaled().eigenvalues, 2) * beta;
    const double direct = base - lagrange.multipliers().dot(spectrum);
    CHECK(lagrangian(beta, lagrange, h, data, ctx) == doctest::Approx(direct).epsilon(1e-12));

    // With a feasible beta, raising every multiplier lowers the Lagrangian.
    REQUIRE(spectrum.minCoeff() > 0.0);
    LagrangeState raised = lagrange;
    raised.log_multipliers.array() += 0.5;
    CHECK(lagrangian(beta, raised, h, data, ctx) < lagrangian(beta, lagrange, h, data, ctx));
    CHECK_THROWS_AS(lagrangian(beta, LagrangeState::zeros(5), h, data, ctx), ValidationError);
  }

  TEST_CASE("identity-filter data gives a flat spectrum") {
    const Graph g = sensor30(0);
    const GraphContext ctx(g);
    const TrainingSet data = synthetic(g, GroundTruthFilter::identity(), 50, 0);
    const FitReport r = fit_polynomial(data, ctx, 1, SpectrumHint::general,
                                       InputKernelConfig::independent(), OptimizerConfig{});
    CHECK(r.feasible);
    CHECK(scaled_sup_distance(r.hyperparameters.polynomial(), PolynomialGraphFilter{1.0}) <= 0.05);
  }

  TEST_CASE("low-pass recovery at degree 2 and the KKT exit check") {
    const Graph g = sensor30(0);
    const GraphContext ctx(g);
    const auto truth = GroundTruthFilter::lowpass_taylor();
    const TrainingSet data = synthetic(g, truth, 50, 0);
    const FitReport r = fit_polynomial(data, ctx, 2, SpectrumHint::lowpass,
                                       InputKernelConfig::independent(), OptimizerConfig{});
    CHECK(r.feasible);
    CHECK(r.min_spectrum >= -1e-8);
    const Eigen::VectorXd& lam = ctx.scaled().eigenvalues;
    CHECK(r.hyperparameters.polynomial()(lam).minCoeff() >= -1e-8);
    CHECK(scaled_sup_distance(r.hyperparameters.polynomial(), truth.polynomial) <= 0.15);
    REQUIRE(r.initialization.has_value());
    CHECK(std::isfinite(r.initialization->best.log_likelihood));
    CHECK(r.initialization->grid_size == 11u * 11u * 11u * 2u);
    CHECK_FALSE(r.initialization->sampled);
    if (r.converged && r.feasibility_shift == 0.0) {
      const Eigen::VectorXd slack =
          r.lagrange.multipliers().cwiseProduct(r.hyperparameters.polynomial()(lam));
      CHECK(slack.cwiseAbs().maxCoeff() <= 0.01 * std::abs(r.log_likelihood));
    }
  }

  TEST_CASE("constrained fits stay feasible across filters and degrees") {
    const Graph g = sensor30(1);
    const GraphContext ctx(g);
    const TrainingSet data = synthetic(g, GroundTruthFilter::bandpass(), 40, 1);
    for (int degree : {0, 1, 3}) {
      const FitReport r = fit_polynomial(data, ctx, degree, SpectrumHint::general,
                                         InputKernelConfig::independent(), OptimizerConfig{});
      CHECK(r.hyperparameters.polynomial()(ctx.scaled().eigenvalues).minCoeff() >= -1e-8);
      CHECK(r.feasible);
      CHECK(std::isfinite(r.log_likelihood));
    }
  }

  TEST_CASE("two-sample scalar maximum likelihood") {
    // P = 0 on two nodes with K = 1: both entries of y are i.i.d. with
    // variance beta_0^2 + noise, whose MLE is the mean square.
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    const GraphContext ctx{Graph(a)};
    Eigen::MatrixXd y(1, 2);
    y << 1.2, -0.7;
    const TrainingSet data{index_inputs(1), y};
    const Hyperparameters init{PolynomialGraphFilter{0.5}, InputKernelConfig::independent(), 0.2};
    const UnconstrainedResult r = unconstrained_fit(data, ctx, 0, OptimizerConfig{}, init);
    const double b0 = r.hyperparameters.polynomial().coefficients()(0);
    const double total = b0 * b0 + r.hyperparameters.noise_variance;
    CHECK(std::abs(total - y.squaredNorm() / 2.0) <= 1e-3);
  }

  TEST_CASE("unconstrained trace is non-decreasing and beats the grid") {
    const Graph g = sensor30(2);
    const GraphContext ctx(g);
    const TrainingSet data = synthetic(g, GroundTruthFilter::lowpass_taylor(), 50, 2);
    const FitReport r = fit_polynomial(data, ctx, 3, SpectrumHint::lowpass,
                                       InputKernelConfig::independent(), OptimizerConfig{}, false);
    REQUIRE(r.initialization.has_value());
    CHECK(r.log_likelihood >= r.initialization->best.log_likelihood);
    CHECK_FALSE(r.constrained);

    Hyperparameters init = r.hyperparameters;
    init.output = PolynomialGraphFilter{1.0, 0.0, 0.0, 0.0};
    init.noise_variance = 1.0;
    OptimizerConfig cfg;
    cfg.unconstrained_iterations = 200;
    const UnconstrainedResult u = unconstrained_fit(data, ctx, 3, cfg, init);
    for (std::size_t i = 1; i < u.trace.size(); ++i) CHECK(u.trace[i] >= u.trace[i - 1]);
  }

  TEST_CASE("unconstrained fit of a baseline with a squared-exponential input kernel") {
    auto rng = make_stream(105);
    const Graph g = sensor30(3);
    const GraphContext ctx(g);
    const SyntheticDataset ds = generate_filtered_signals(g, GroundTruthFilter::lowpass_taylor(), 30,
                                                          10.0, 3);
    const TrainingSet data{gaussian(30, 2, rng), ds.signals};
    OptimizerConfig cfg;
    cfg.unconstrained_iterations = 300;
    const UnconstrainedResult r = fit_baseline(data, ctx, {BaselineKind::regularized_laplacian, 1.0},
                                               InputKernelConfig::squared_exponential(1, 1), cfg);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1]);
    CHECK(r.hyperparameters.baseline().alpha > 0.0);
    CHECK(r.hyperparameters.input.lengthscale > 0.0);
  }

  TEST_CASE("initialization statistics") {
    const Graph g = sensor(11);
    const GraphContext ctx(g);
    auto rng = make_stream(106);
    const TrainingSet data{gaussian(5, 1, rng), gaussian(5, 6, rng)};
    double mean_norm = 0.0;
    for (Eigen::Index n = 0; n < 5; ++n) mean_norm += data.signals.row(n).squaredNorm() / 5.0;
    const Initialization init = initialize_hyperparameters(
        data, ctx, 1, SpectrumHint::general, InputKernelConfig::squared_exponential(1, 1), OptimizerConfig{});
    REQUIRE(init.record.lengthscale.has_value());
    CHECK(*init.record.lengthscale == doctest::Approx(mean_norm).epsilon(1e-12));
    const double mean = data.signals.mean();
    CHECK(init.record.signal_variance ==
          doctest::Approx((data.signals.array() - mean).square().mean()).epsilon(1e-12));
    CHECK(init.record.grid_size == 11u * 11u * 2u);

    const TrainingSet zeros{gaussian(5, 1, rng), Eigen::MatrixXd::Zero(5, 6)};
    CHECK_THROWS_AS(initialize_hyperparameters(zeros, ctx, 1, SpectrumHint::general,
                                               InputKernelConfig::squared_exponential(1, 1),
                                               OptimizerConfig{}),
                    ValidationError);
  }

  TEST_CASE("large grids are sampled") {
    const Graph g = sensor(12);
    const GraphContext ctx(g);
    auto rng = make_stream(107);
    const TrainingSet data{index_inputs(6), gaussian(6, 6, rng)};
    OptimizerConfig cfg;
    cfg.max_grid_candidates = 500;
    cfg.unconstrained_iterations = 5;
    const Initialization init = initialize_hyperparameters(data, ctx, 4, SpectrumHint::general,
                                                           InputKernelConfig::independent(), cfg);
    CHECK(init.record.sampled);
    CHECK(init.record.grid_size == 1000u);
  }

  TEST_CASE("fits are deterministic") {
    const Graph g = sensor30(4);
    const GraphContext ctx(g);
    const TrainingSet data = synthetic(g, GroundTruthFilter::lowpass_taylor(), 30, 4);
    const FitReport a = fit_polynomial(data, ctx, 2, SpectrumHint::lowpass,
                                       InputKernelConfig::independent(), OptimizerConfig{});
    const FitReport b = fit_polynomial(data, ctx, 2, SpectrumHint::lowpass,
                                       InputKernelConfig::independent(), OptimizerConfig{});
    CHECK(a.trace.size() == b.trace.size());
    CHECK((a.hyperparameters.polynomial().coefficients() - b.hyperparameters.polynomial().coefficients())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(a.log_likelihood == b.log_likelihood);
  }

  TEST_CASE("filter scale trades against the input variance") {
    const Graph g = sensor30(5);
    const GraphContext ctx(g);
    const TrainingSet data = synthetic(g, GroundTruthFilter::bandpass(), 20, 5);
    const PolynomialGraphFilter f{0.1, 1.0, 4.0, 1.0, -6.0};
    const ScaledFilter s = scale_polynomial(f);
    const Hyperparameters original{f, InputKernelConfig::independent(1.0), 0.3};
    const Hyperparameters rescaled{s.filter, InputKernelConfig::independent(s.scale * s.scale), 0.3};
    CHECK(log_marginal_likelihood(rescaled, data, ctx) ==
          doctest::Approx(log_marginal_likelihood(original, data, ctx)).epsilon(1e-10));
  }

  TEST_CASE("sign canonicalization and configuration checks") {
    Eigen::VectorXd lam = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
    const auto flipped = canonical_sign(PolynomialGraphFilter{-1.0, 0.2}, lam);
    CHECK(flipped.coefficients()(0) == 1.0);
    CHECK(flipped.coefficients()(1) == -0.2);
    CHECK(canonical_sign(PolynomialGraphFilter{1.0}, lam).coefficients()(0) == 1.0);

    OptimizerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.beta_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = OptimizerConfig{};
    cfg.inner_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK(parse_spectrum_hint("lowpass") == SpectrumHint::lowpass);
    CHECK(parse_spectrum_hint(to_string(SpectrumHint::general)) == SpectrumHint::general);
    CHECK_THROWS_AS(parse_spectrum_hint("highpass"), ValidationError);
  }
}
