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

#ifndef GRAPHGP_GP_ENGINE_HPP
#define GRAPHGP_GP_ENGINE_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "graphgp/graph.hpp"
#include "graphgp/kernels.hpp"

namespace graphgp {

/// Eigenpairs of a symmetric PSD matrix. Eigenvalues are clamped at zero.
struct SymmetricEigen {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& psd);

using OutputKernel = std::variant<PolynomialGraphFilter, BaselineGraphKernel>;

/// Full hyperparameter set: output kernel on the graph, input kernel and
/// observation noise. With a polynomial output kernel the input variance is
/// kept at 1, its role being played by the scale of beta.
struct Hyperparameters {
  OutputKernel output;
  InputKernelConfig input;
  double noise_variance = 0.1;

  bool is_polynomial() const { return std::holds_alternative<PolynomialGraphFilter>(output); }
  const PolynomialGraphFilter& polynomial() const { return std::get<PolynomialGraphFilter>(output); }
  const BaselineGraphKernel& baseline() const { return std::get<BaselineGraphKernel>(output); }

  void validate() const;
  std::string describe() const;
};

/// Training signals. Row n of `signals` is y_n (length M), row n of `inputs`
/// is x_n.
struct TrainingSet {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd signals;

  Eigen::Index size() const { return signals.rows(); }
  Eigen::Index num_nodes() const { return signals.cols(); }
  void validate(Eigen::Index num_nodes) const;
};

/// Stacks signal rows node-fastest: block n of the result is y_n.
Eigen::VectorXd vectorize(const Eigen::MatrixXd& signals);
Eigen::MatrixXd unvectorize(const Eigen::VectorXd& stacked, Eigen::Index num_signals,
                            Eigen::Index num_nodes);

/// Graph-side state needed to turn an output kernel into BB^T.
class GraphContext {
 public:
  explicit GraphContext(Graph graph);

  const Graph& graph() const { return baselines_.graph(); }
  Eigen::Index num_nodes() const { return graph().num_nodes(); }
  const SpectralDecomposition& scaled() const { return scaled_; }
  const BaselineGramBuilder& baselines() const { return baselines_; }

  Eigen::MatrixXd output_gram(const OutputKernel& kernel) const;
  SymmetricEigen output_gram_eigen(const OutputKernel& kernel) const;

 private:
  BaselineGramBuilder baselines_;
  SpectralDecomposition scaled_;
};

/// K (x) G + noise I, diagonalized by U_K (x) U_G with per-frequency
/// variances d_ij = lambda_K,i lambda_G,j + noise.
///
/// Signals are handled as N x M matrices whose rows are the stacked blocks,
/// so nothing of size NM x NM is ever formed.
class KroneckerSystem {
 public:
  KroneckerSystem(SymmetricEigen input, SymmetricEigen output, double noise);

  Eigen::Index num_signals() const { return input_.values.size(); }
  Eigen::Index num_nodes() const { return output_.values.size(); }
  const SymmetricEigen& input() const { return input_; }
  const SymmetricEigen& output() const { return output_; }
  double noise() const { return noise_; }
  const Eigen::MatrixXd& variances() const { return variances_; }

  /// U_K^T Y U_G.
  Eigen::MatrixXd rotate(const Eigen::MatrixXd& signals) const;
  /// U_K A U_G^T.
  Eigen::MatrixXd unrotate(const Eigen::MatrixXd& rotated) const;

  /// Sigma^{-1} applied to the stacked signals, returned in matrix form.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& signals) const;
  double log_det() const;
  double log_likelihood(const Eigen::MatrixXd& signals) const;

 private:
  SymmetricEigen input_;
  SymmetricEigen output_;
  double noise_;
  Eigen::MatrixXd variances_;
};

/// Dense K (x) gram + noise I under the node-fastest ordering.
Eigen::MatrixXd full_covariance(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram,
                                double noise);

struct SolveResult {
  Eigen::VectorXd solution;
  double log_det = 0.0;
};

SolveResult kron_solve_and_logdet(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram,
                                  double noise, const Eigen::VectorXd& v);

/// Reference evaluation through a dense Cholesky factor; limited to NM <= 400.
double dense_log_marginal_likelihood(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram,
                                     double noise, const Eigen::VectorXd& stacked);

KroneckerSystem build_system(const Hyperparameters& h, const TrainingSet& data,
                             const GraphContext& ctx);

double log_marginal_likelihood(const Hyperparameters& h, const TrainingSet& data,
                               const GraphContext& ctx);

/// Predictive distribution per test input. Row t of `mean` is mu_* for test
/// input t and `covariance[t]` is its M x M Sigma_*.
struct Posterior {
  Eigen::MatrixXd mean;
  std::vector<Eigen::MatrixXd> covariance;

  Eigen::Index size() const { return mean.rows(); }
};

/// Gaussian conditioning of the joint prior. `cross` is K(x_n, x_*) (N x N_*),
/// `test_prior` holds K(x_*, x_*) for each test input.
Posterior posterior_predict(const KroneckerSystem& system, const Eigen::MatrixXd& signals,
                            const Eigen::MatrixXd& cross, const Eigen::VectorXd& test_prior);

Posterior posterior_predict(const Hyperparameters& h, const TrainingSet& data,
                            const GraphContext& ctx, const Eigen::MatrixXd& test_inputs);

/// log N(y | mean, cov) after adding 1e-8 trace/M jitter to the diagonal.
double test_log_likelihood(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const Eigen::VectorXd& y);

/// Sum of per-signal predictive log densities of the rows of `signals`.
double test_log_likelihood(const Posterior& posterior, const Eigen::MatrixXd& signals);

/// sum_i b_i b_i^T over the columns of B, accumulated one column at a time.
Eigen::MatrixXd icm_gram_oracle(const Eigen::MatrixXd& b);

}  // namespace graphgp

#endif  // GRAPHGP_GP_ENGINE_HPP
