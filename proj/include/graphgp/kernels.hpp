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

#ifndef GRAPHGP_KERNELS_HPP
#define GRAPHGP_KERNELS_HPP

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "graphgp/graph.hpp"

namespace graphgp {

/// g(lambda) = beta_0 + beta_1 lambda + ... + beta_P lambda^P, applied to the
/// scaled Laplacian.
class PolynomialGraphFilter {
 public:
  PolynomialGraphFilter() : coefficients_(Eigen::VectorXd::Ones(1)) {}
  explicit PolynomialGraphFilter(Eigen::VectorXd coefficients);
  PolynomialGraphFilter(std::initializer_list<double> coefficients);

  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }

  double operator()(double lambda) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& lambdas) const;

  /// g(lambda_i) >= -tol at every eigenvalue.
  bool is_feasible(const Eigen::VectorXd& eigenvalues, double tol = 1e-8) const;

 private:
  Eigen::VectorXd coefficients_;
};

inline Eigen::VectorXd evaluate_spectrum(const PolynomialGraphFilter& f,
                                         const Eigen::VectorXd& lambdas) {
  return f(lambdas);
}

/// B = U g(Lambda) U^T. Requires the scaled variant.
Eigen::MatrixXd filter_matrix(const PolynomialGraphFilter& f, const SpectralDecomposition& sd);

struct ScaledFilter {
  PolynomialGraphFilter filter;
  double scale = 1.0;
};

/// Divides g by c = max over [0, 1] of g, located on a 1e-4 grid plus endpoints.
ScaledFilter scale_polynomial(const PolynomialGraphFilter& f);

/// Maximum of g over a uniform grid on [0, 1] (endpoints included).
double max_on_unit_interval(const PolynomialGraphFilter& f, double step = 1e-4);

/// Row i = (1, lambda_i, ..., lambda_i^P).
Eigen::MatrixXd vandermonde(const Eigen::VectorXd& lambdas, int degree);

enum class InputKernelKind { squared_exponential, precomputed, independent };

/// Input-space kernel K.
///
/// squared_exponential: K_ij = variance * exp(-|x_i - x_j|^2 / (2 lengthscale)).
/// precomputed: inputs are single-column integer indices into `covariance`,
/// K_ij = variance * covariance(x_i, x_j).
/// independent: inputs are non-negative integer indices, K_ij = variance [x_i == x_j].
struct InputKernelConfig {
  InputKernelKind kind = InputKernelKind::squared_exponential;
  double lengthscale = 1.0;
  double variance = 1.0;
  Eigen::MatrixXd covariance;

  static InputKernelConfig squared_exponential(double lengthscale, double variance) {
    return {InputKernelKind::squared_exponential, lengthscale, variance, {}};
  }
  static InputKernelConfig precomputed(Eigen::MatrixXd covariance, double variance = 1.0) {
    return {InputKernelKind::precomputed, 1.0, variance, std::move(covariance)};
  }
  static InputKernelConfig independent(double variance = 1.0) {
    return {InputKernelKind::independent, 1.0, variance, {}};
  }

  bool has_lengthscale() const { return kind == InputKernelKind::squared_exponential; }
  void validate() const;
};

Eigen::MatrixXd input_kernel_matrix(const InputKernelConfig& cfg, const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& x_prime);

/// dK / d(log lengthscale) for the squared-exponential kernel.
Eigen::MatrixXd input_kernel_log_lengthscale_derivative(const InputKernelConfig& cfg,
                                                        const Eigen::MatrixXd& x);

/// Column of index inputs 0..n-1 for precomputed kernels.
Eigen::MatrixXd index_inputs(Eigen::Index n, Eigen::Index offset = 0);

enum class BaselineKind {
  standard,
  global_filtering,
  local_averaging,
  laplacian_pseudoinverse,
  regularized_laplacian,
  diffusion,
  p_step_random_walk,
  cosine,
};

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view name);
std::vector<BaselineKind> all_baseline_kinds();

/// Whether alpha enters the kernel of this kind.
bool uses_alpha(BaselineKind kind);

/// Fixed-form output kernels on graphs.
///
///   standard                 B = I
///   global_filtering         B = (I + alpha L)^{-1}
///   local_averaging          B = (I + alpha D)^{-1} (I + alpha A)
///   laplacian_pseudoinverse  BB^T = L^+
///   regularized_laplacian    BB^T = (I + alpha Ln)^{-1}
///   diffusion                BB^T = exp(-alpha/2 Ln)
///   p_step_random_walk       BB^T = (alpha I - Ln)^p
///   cosine                   BB^T = cos(Ln pi / 4)
///
/// with L combinatorial and Ln normalized.
struct BaselineGraphKernel {
  BaselineKind kind = BaselineKind::standard;
  double alpha = 1.0;
  int p = 1;
};

/// Caches the Laplacian decompositions of one graph so that baseline Grams
/// and their alpha-derivatives can be rebuilt cheaply during optimization.
class BaselineGramBuilder {
 public:
  explicit BaselineGramBuilder(Graph graph);

  const Graph& graph() const { return graph_; }
  const SpectralDecomposition& combinatorial() const { return combinatorial_; }
  const SpectralDecomposition& normalized() const;
  double normalized_lambda_max() const { return normalized().eigenvalues.maxCoeff(); }

  /// Throws ValidationError when the kernel parameters are invalid for this graph.
  void validate(const BaselineGraphKernel& b) const;

  Eigen::MatrixXd gram(const BaselineGraphKernel& b) const;
  /// d(BB^T)/d(alpha); zero matrix for kinds without alpha.
  Eigen::MatrixXd gram_alpha_derivative(const BaselineGraphKernel& b) const;

 private:
  Graph graph_;
  SpectralDecomposition combinatorial_;
  bool has_normalized_ = false;
  SpectralDecomposition normalized_;
};

Eigen::MatrixXd baseline_output_gram(const BaselineGraphKernel& b, const Graph& g);

/// Spectral response r^{-1}(lambda) of BB^T for kinds that are functions of one
/// Laplacian. `variant` receives the Laplacian the response is defined on.
/// Throws for local averaging, which is not a spectral function.
double baseline_response(const BaselineGraphKernel& b, double lambda,
                         LaplacianVariant* variant = nullptr);

}  // namespace graphgp

#endif  // GRAPHGP_KERNELS_HPP
