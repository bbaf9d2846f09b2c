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

#include "graphgp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "graphgp/error.hpp"

namespace graphgp {

PolynomialGraphFilter::PolynomialGraphFilter(Eigen::VectorXd coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.size() == 0) throw ValidationError("polynomial needs at least one coefficient");
  if (!coefficients_.allFinite()) throw ValidationError("polynomial coefficients must be finite");
}

PolynomialGraphFilter::PolynomialGraphFilter(std::initializer_list<double> coefficients)
    : PolynomialGraphFilter(Eigen::Map<const Eigen::VectorXd>(
          coefficients.begin(), static_cast<Eigen::Index>(coefficients.size()))) {}

double PolynomialGraphFilter::operator()(double lambda) const {
  double acc = 0.0;
  for (Eigen::Index i = coefficients_.size() - 1; i >= 0; --i) acc = acc * lambda + coefficients_(i);
  return acc;
}

Eigen::VectorXd PolynomialGraphFilter::operator()(const Eigen::VectorXd& lambdas) const {
  return lambdas.unaryExpr([this](double l) { return (*this)(l); });
}

bool PolynomialGraphFilter::is_feasible(const Eigen::VectorXd& eigenvalues, double tol) const {
  return ((*this)(eigenvalues).array() >= -tol).all();
}

Eigen::MatrixXd filter_matrix(const PolynomialGraphFilter& f, const SpectralDecomposition& sd) {
  if (sd.variant != LaplacianVariant::scaled) {
    throw ValidationError("polynomial filters are defined on the scaled Laplacian");
  }
  const Eigen::VectorXd response = f(sd.eigenvalues);
  return sd.eigenvectors * response.asDiagonal() * sd.eigenvectors.transpose();
}

double max_on_unit_interval(const PolynomialGraphFilter& f, double step) {
  if (!(step > 0.0) || step > 1.0) throw ValidationError("grid step must lie in (0, 1]");
  const auto count = static_cast<long>(std::floor(1.0 / step + 1e-9));
  double best = std::max(f(0.0), f(1.0));
  for (long i = 1; i <= count; ++i) {
    best = std::max(best, f(std::min(1.0, static_cast<double>(i) * step)));
  }
  return best;
}

ScaledFilter scale_polynomial(const PolynomialGraphFilter& f) {
  const double c = max_on_unit_interval(f);
  if (!(c > 0.0)) {
    throw ValidationError("filter is non-positive on [0, 1]; cannot normalize its peak");
  }
  return {PolynomialGraphFilter(Eigen::VectorXd(f.coefficients() / c)), c};
}

Eigen::MatrixXd vandermonde(const Eigen::VectorXd& lambdas, int degree) {
  if (degree < 0) throw ValidationError("polynomial degree must be non-negative");
  Eigen::MatrixXd v(lambdas.size(), degree + 1);
  if (lambdas.size() == 0) return v;
  v.col(0).setOnes();
  for (int k = 1; k <= degree; ++k) v.col(k) = v.col(k - 1).cwiseProduct(lambdas);
  return v;
}

void InputKernelConfig::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ValidationError("input kernel variance must be positive");
  }
  if (kind == InputKernelKind::squared_exponential) {
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
      throw ValidationError("input kernel lengthscale must be positive");
    }
  } else if (kind == InputKernelKind::precomputed) {
    if (covariance.rows() == 0 || covariance.rows() != covariance.cols()) {
      throw ValidationError("precomputed input covariance must be a non-empty square matrix");
    }
    if (!covariance.allFinite()) throw ValidationError("precomputed input covariance is not finite");
  }
}

namespace {

Eigen::Index checked_index(double value, Eigen::Index size) {
  const double rounded = std::round(value);
  if (rounded != value || rounded < 0 || rounded >= static_cast<double>(size)) {
    throw ValidationError("precomputed-kernel input " + std::to_string(value) +
                          " is not a valid signal index");
  }
  return static_cast<Eigen::Index>(rounded);
}

}  // namespace

Eigen::MatrixXd input_kernel_matrix(const InputKernelConfig& cfg, const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& x_prime) {
  cfg.validate();
  if (x.cols() != x_prime.cols()) throw ValidationError("input dimensions differ");
  Eigen::MatrixXd k(x.rows(), x_prime.rows());

  if (cfg.kind == InputKernelKind::independent) {
    if (x.cols() != 1) throw ValidationError("independent kernel expects one index column");
    constexpr auto unbounded = std::numeric_limits<Eigen::Index>::max();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Eigen::Index a = checked_index(x(i, 0), unbounded);
      for (Eigen::Index j = 0; j < x_prime.rows(); ++j) {
        k(i, j) = a == checked_index(x_prime(j, 0), unbounded) ? cfg.variance : 0.0;
      }
    }
    return k;
  }

  if (cfg.kind == InputKernelKind::precomputed) {
    if (x.cols() != 1) throw ValidationError("precomputed kernel expects one index column");
    const Eigen::Index n = cfg.covariance.rows();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Eigen::Index a = checked_index(x(i, 0), n);
      for (Eigen::Index j = 0; j < x_prime.rows(); ++j) {
        k(i, j) = cfg.variance * cfg.covariance(a, checked_index(x_prime(j, 0), n));
      }
    }
    return k;
  }

  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x_prime.rows(); ++j) {
      const double sq = (x.row(i) - x_prime.row(j)).squaredNorm();
      k(i, j) = cfg.variance * std::exp(-sq / (2.0 * cfg.lengthscale));
    }
  }
  return k;
}

Eigen::MatrixXd input_kernel_log_lengthscale_derivative(const InputKernelConfig& cfg,
                                                        const Eigen::MatrixXd& x) {
  if (!cfg.has_lengthscale()) return Eigen::MatrixXd::Zero(x.rows(), x.rows());
  cfg.validate();
  Eigen::MatrixXd dk(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const double r = (x.row(i) - x.row(j)).squaredNorm() / (2.0 * cfg.lengthscale);
      dk(i, j) = cfg.variance * std::exp(-r) * r;
    }
  }
  return dk;
}

Eigen::MatrixXd index_inputs(Eigen::Index n, Eigen::Index offset) {
  return Eigen::VectorXd::LinSpaced(n, static_cast<double>(offset),
                                    static_cast<double>(offset + n - 1));
}

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::standard: return "standard";
    case BaselineKind::global_filtering: return "global-filtering";
    case BaselineKind::local_averaging: return "local-averaging";
    case BaselineKind::laplacian_pseudoinverse: return "laplacian-pseudoinverse";
    case BaselineKind::regularized_laplacian: return "regularized-laplacian";
    case BaselineKind::diffusion: return "diffusion";
    case BaselineKind::p_step_random_walk: return "p-step-random-walk";
    case BaselineKind::cosine: return "cosine";
  }
  return "unknown";
}

std::vector<BaselineKind> all_baseline_kinds() {
  return {BaselineKind::standard,          BaselineKind::global_filtering,
          BaselineKind::local_averaging,   BaselineKind::laplacian_pseudoinverse,
          BaselineKind::regularized_laplacian, BaselineKind::diffusion,
          BaselineKind::p_step_random_walk, BaselineKind::cosine};
}

BaselineKind parse_baseline_kind(std::string_view name) {
  std::string canon(name);
  for (char& c : canon) {
    if (c == '_') c = '-';
  }
  for (BaselineKind kind : all_baseline_kinds()) {
    if (to_string(kind) == canon) return kind;
  }
  throw ValidationError("unknown baseline kernel '" + std::string(name) + "'");
}

bool uses_alpha(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::global_filtering:
    case BaselineKind::local_averaging:
    case BaselineKind::regularized_laplacian:
    case BaselineKind::diffusion:
    case BaselineKind::p_step_random_walk:
      return true;
    default:
      return false;
  }
}

namespace {

constexpr double kPseudoInverseRelTol = 1e-10;

Eigen::MatrixXd spectral_matrix(const SpectralDecomposition& sd, const Eigen::VectorXd& response) {
  return sd.eigenvectors * response.asDiagonal() * sd.eigenvectors.transpose();
}

}  // namespace

double baseline_response(const BaselineGraphKernel& b, double lambda, LaplacianVariant* variant) {
  auto set_variant = [&](LaplacianVariant v) {
    if (variant != nullptr) *variant = v;
  };
  switch (b.kind) {
    case BaselineKind::standard:
      set_variant(LaplacianVariant::combinatorial);
      return 1.0;
    case BaselineKind::global_filtering: {
      set_variant(LaplacianVariant::combinatorial);
      const double r = 1.0 / (1.0 + b.alpha * lambda);
      return r * r;
    }
    case BaselineKind::laplacian_pseudoinverse:
      set_variant(LaplacianVariant::combinatorial);
      return lambda > 0.0 ? 1.0 / lambda : 0.0;
    case BaselineKind::regularized_laplacian:
      set_variant(LaplacianVariant::normalized);
      return 1.0 / (1.0 + b.alpha * lambda);
    case BaselineKind::diffusion:
      set_variant(LaplacianVariant::normalized);
      return std::exp(-0.5 * b.alpha * lambda);
    case BaselineKind::p_step_random_walk:
      set_variant(LaplacianVariant::normalized);
      return std::pow(b.alpha - lambda, b.p);
    case BaselineKind::cosine:
      set_variant(LaplacianVariant::normalized);
      return std::cos(lambda * std::numbers::pi / 4.0);
    case BaselineKind::local_averaging:
      break;
  }
  throw ValidationError("local averaging has no spectral response on a single Laplacian");
}

BaselineGramBuilder::BaselineGramBuilder(Graph graph)
    : graph_(std::move(graph)),
      combinatorial_(decompose(graph_, LaplacianVariant::combinatorial)) {
  const Eigen::VectorXd deg = graph_.degrees();
  if ((deg.array() > 0.0).all()) {
    normalized_ = decompose(graph_, LaplacianVariant::normalized);
    has_normalized_ = true;
  }
}

const SpectralDecomposition& BaselineGramBuilder::normalized() const {
  if (!has_normalized_) {
    throw DegreeZeroError("graph has an isolated node; normalized Laplacian kernels unavailable");
  }
  return normalized_;
}

void BaselineGramBuilder::validate(const BaselineGraphKernel& b) const {
  if (uses_alpha(b.kind) && (!(b.alpha > 0.0) || !std::isfinite(b.alpha))) {
    throw ValidationError("baseline alpha must be positive");
  }
  if (b.kind == BaselineKind::p_step_random_walk) {
    if (b.p < 1) throw ValidationError("random-walk step count p must be positive");
    const double lmax = normalized_lambda_max();
    if (b.alpha < lmax + 1e-8) {
      throw ValidationError("p-step random walk needs alpha >= lambda_max of the normalized "
                            "Laplacian (" + std::to_string(lmax) + ")");
    }
  }
}

Eigen::MatrixXd BaselineGramBuilder::gram(const BaselineGraphKernel& b) const {
  validate(b);
  const Eigen::Index m = graph_.num_nodes();
  switch (b.kind) {
    case BaselineKind::standard:
      return Eigen::MatrixXd::Identity(m, m);
    case BaselineKind::local_averaging: {
      const Eigen::VectorXd scale =
          (Eigen::VectorXd::Ones(m) + b.alpha * graph_.degrees()).cwiseInverse();
      const Eigen::MatrixXd filter =
          scale.asDiagonal() *
          (Eigen::MatrixXd::Identity(m, m) + b.alpha * graph_.adjacency());
      return filter * filter.transpose();
    }
    case BaselineKind::laplacian_pseudoinverse: {
      const Eigen::VectorXd& lam = combinatorial_.eigenvalues;
      const double cutoff = kPseudoInverseRelTol * lam.maxCoeff();
      const Eigen::VectorXd response =
          lam.unaryExpr([cutoff](double l) { return l > cutoff ? 1.0 / l : 0.0; });
      return spectral_matrix(combinatorial_, response);
    }
    default: {
      LaplacianVariant variant{};
      baseline_response(b, 0.0, &variant);
      const SpectralDecomposition& sd =
          variant == LaplacianVariant::normalized ? normalized() : combinatorial_;
      const Eigen::VectorXd response =
          sd.eigenvalues.unaryExpr([&b](double l) { return baseline_response(b, l); });
      return spectral_matrix(sd, response);
    }
  }
}

Eigen::MatrixXd BaselineGramBuilder::gram_alpha_derivative(const BaselineGraphKernel& b) const {
  validate(b);
  const Eigen::Index m = graph_.num_nodes();
  const double a = b.alpha;
  switch (b.kind) {
    case BaselineKind::global_filtering: {
      const Eigen::VectorXd d = combinatorial_.eigenvalues.unaryExpr(
          [a](double l) { return -2.0 * l / std::pow(1.0 + a * l, 3); });
      return spectral_matrix(combinatorial_, d);
    }
    case BaselineKind::local_averaging: {
      const Eigen::VectorXd deg = graph_.degrees();
      const Eigen::VectorXd scale = (Eigen::VectorXd::Ones(m) + a * deg).cwiseInverse();
      const Eigen::MatrixXd filter =
          scale.asDiagonal() * (Eigen::MatrixXd::Identity(m, m) + a * graph_.adjacency());
      const Eigen::MatrixXd dfilter =
          scale.asDiagonal() * (graph_.adjacency() - deg.asDiagonal() * filter);
      const Eigen::MatrixXd cross = dfilter * filter.transpose();
      return cross + cross.transpose();
    }
    case BaselineKind::regularized_laplacian: {
      const Eigen::VectorXd d = normalized().eigenvalues.unaryExpr(
          [a](double l) { return -l / ((1.0 + a * l) * (1.0 + a * l)); });
      return spectral_matrix(normalized(), d);
    }
    case BaselineKind::diffusion: {
      const Eigen::VectorXd d = normalized().eigenvalues.unaryExpr(
          [a](double l) { return -0.5 * l * std::exp(-0.5 * a * l); });
      return spectral_matrix(normalized(), d);
    }
    case BaselineKind::p_step_random_walk: {
      const int p = b.p;
      const Eigen::VectorXd d = normalized().eigenvalues.unaryExpr(
          [a, p](double l) { return p * std::pow(a - l, p - 1); });
      return spectral_matrix(normalized(), d);
    }
    default:
      return Eigen::MatrixXd::Zero(m, m);
  }
}

Eigen::MatrixXd baseline_output_gram(const BaselineGraphKernel& b, const Graph& g) {
  return BaselineGramBuilder(g).gram(b);
}

}  // namespace graphgp
