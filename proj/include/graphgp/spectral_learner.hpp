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

#ifndef GRAPHGP_SPECTRAL_LEARNER_HPP
#define GRAPHGP_SPECTRAL_LEARNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "graphgp/error.hpp"
#include "graphgp/gp_engine.hpp"

namespace graphgp {

/// Lagrange multipliers stored through their logarithms so they stay positive.
struct LagrangeState {
  Eigen::VectorXd log_multipliers;

  static LagrangeState zeros(Eigen::Index m) { return {Eigen::VectorXd::Zero(m)}; }
  Eigen::VectorXd multipliers() const { return log_multipliers.array().exp(); }
};

struct OptimizerConfig {
  // Initial step sizes; each adapts by halving on a rejected step and
  // doubling after an accepted one.
  double beta_rate = 1.0;
  double multiplier_rate = 1.0;
  double lengthscale_rate = 1.0;
  double noise_rate = 1.0;
  double alpha_rate = 1.0;
  double variance_rate = 1.0;

  int max_outer_iterations = 2000;
  int inner_steps = 50;
  int max_halvings = 30;
  double tolerance = 1e-6;
  int patience = 5;

  int unconstrained_iterations = 2000;
  // beta steps are taken in coordinates where the Vandermonde matrix of the
  // graph eigenvalues is orthonormal.
  bool precondition = true;

  std::size_t max_grid_candidates = 20000;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SpectrumHint { lowpass, general };

std::string_view to_string(SpectrumHint hint);
SpectrumHint parse_spectrum_hint(std::string_view name);

/// Derivatives of -l. Only the entries that apply to the hyperparameters'
/// kernel kinds are meaningful; the others are zero.
///
/// `alpha` is taken with respect to log(alpha), except for the p-step random
/// walk where alpha = lambda_max + softplus(raw) and the derivative is with
/// respect to raw.
struct HyperGradient {
  Eigen::VectorXd beta;
  double log_lengthscale = 0.0;
  double log_noise = 0.0;
  double alpha = 0.0;
  double log_variance = 0.0;
};

/// Evaluates -l and its gradient, caching the input-kernel eigendecomposition
/// and the rotated data between calls that leave them unchanged.
class ModelEvaluator {
 public:
  ModelEvaluator(const TrainingSet& data, const GraphContext& ctx);

  const TrainingSet& data() const { return data_; }
  const GraphContext& context() const { return ctx_; }

  double negative_log_likelihood(const Hyperparameters& h);
  double negative_log_likelihood(const Hyperparameters& h, HyperGradient& grad);

 private:
  struct InputCache {
    bool valid = false;
    InputKernelKind kind = InputKernelKind::squared_exponential;
    double lengthscale = 0.0;
    Eigen::MatrixXd covariance;
    SymmetricEigen unit;  // eigenpairs of K at variance 1
  };
  struct RotationCache {
    bool valid = false;
    double lengthscale = 0.0;
    int basis = -1;
    Eigen::MatrixXd squared;  // (U_K^T Y U_G)^2 elementwise
    Eigen::MatrixXd rotated;
  };

  const SymmetricEigen& unit_input(const InputKernelConfig& cfg);

  TrainingSet data_;
  const GraphContext& ctx_;
  InputCache input_cache_;
  RotationCache rotation_cache_;
};

HyperGradient nll_gradient(const Hyperparameters& h, const TrainingSet& data,
                           const GraphContext& ctx);

/// L(beta, Lambda) = -l(beta) - Lambda^T B_v beta with Lambda = exp(Lambda').
double lagrangian(const Eigen::VectorXd& beta, const LagrangeState& lagrange,
                  const Hyperparameters& h, const TrainingSet& data, const GraphContext& ctx);

struct TraceEntry {
  int iteration = 0;
  double lagrangian = 0.0;
  double negative_log_likelihood = 0.0;
  double max_violation = 0.0;
};

struct GridCandidate {
  Eigen::VectorXd beta;
  double noise_variance = 0.0;
  double log_likelihood = 0.0;
};

struct InitializationRecord {
  double signal_variance = 0.0;
  std::optional<double> lengthscale;
  std::size_t grid_size = 0;
  bool sampled = false;
  std::vector<GridCandidate> candidates;
  GridCandidate best;
  double refined_log_likelihood = 0.0;
};

struct FitReport {
  Hyperparameters hyperparameters;
  std::vector<TraceEntry> trace;
  LagrangeState lagrange;
  bool feasible = false;
  bool converged = false;
  bool constrained = true;
  int iterations = 0;
  double log_likelihood = 0.0;
  // Constant added to beta_0 so the spectrum is non-negative at every
  // eigenvalue; zero when the dual iterations already ended feasible.
  double feasibility_shift = 0.0;
  double min_spectrum = 0.0;
  std::optional<InitializationRecord> initialization;
};

/// Raised when the Lagrangian becomes non-finite; carries the trace so far.
class FitDivergedError : public NumericalError {
 public:
  FitDivergedError(const std::string& what, std::vector<TraceEntry> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<TraceEntry>& trace() const { return trace_; }

 private:
  std::vector<TraceEntry> trace_;
};

/// Alternating dual scheme for min -l(beta) s.t. B_v beta >= 0 with every
/// other hyperparameter held at `init`: a budget of gradient steps on beta
/// against L(beta, e^{Lambda'}), then one ascent step on Lambda'; repeated
/// until L changes by less than the tolerance for `patience` consecutive
/// rounds or the iteration budget runs out.
FitReport constrained_fit(const TrainingSet& data, const GraphContext& ctx, int degree,
                          const OptimizerConfig& cfg, const Hyperparameters& init);

struct UnconstrainedResult {
  Hyperparameters hyperparameters;
  std::vector<double> trace;  // log-likelihood after each iteration
  bool converged = false;
  int iterations = 0;
};

/// Gradient ascent on the log-marginal likelihood over beta (or the baseline
/// alpha and input variance), log lengthscale and log noise. Each parameter
/// block has its own backtracking step, so the trace is non-decreasing.
UnconstrainedResult unconstrained_fit(const TrainingSet& data, const GraphContext& ctx,
                                      int degree, const OptimizerConfig& cfg,
                                      const Hyperparameters& init);

struct Initialization {
  Hyperparameters hyperparameters;
  InitializationRecord record;
};

/// Three-stage start: moment-based lengthscale and signal variance, grid
/// search over beta and noise, then unconstrained refinement.
/// `input_template` fixes the input-kernel kind (and covariance when precomputed).
Initialization initialize_hyperparameters(const TrainingSet& data, const GraphContext& ctx,
                                          int degree, SpectrumHint hint,
                                          const InputKernelConfig& input_template,
                                          const OptimizerConfig& cfg);

/// initialize_hyperparameters followed by constrained_fit (or just the
/// unconstrained refinement when `constrained` is false).
FitReport fit_polynomial(const TrainingSet& data, const GraphContext& ctx, int degree,
                         SpectrumHint hint, const InputKernelConfig& input_template,
                         const OptimizerConfig& cfg, bool constrained = true);

/// Maximum-likelihood fit of a fixed-form baseline kernel: a small grid over
/// alpha and noise followed by unconstrained_fit.
UnconstrainedResult fit_baseline(const TrainingSet& data, const GraphContext& ctx,
                                 BaselineGraphKernel kernel,
                                 const InputKernelConfig& input_template,
                                 const OptimizerConfig& cfg);

/// Signal variance and mean squared norm used to seed the hyperparameters.
double signal_variance(const Eigen::MatrixXd& signals);
double mean_squared_norm(const Eigen::MatrixXd& signals);

/// Flips the sign of beta when the spectrum is mostly negative on the
/// eigenvalues; the likelihood depends on beta only through g^2.
PolynomialGraphFilter canonical_sign(const PolynomialGraphFilter& f,
                                     const Eigen::VectorXd& eigenvalues);

}  // namespace graphgp

#endif  // GRAPHGP_SPECTRAL_LEARNER_HPP
