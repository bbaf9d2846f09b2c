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

#include "graphgp/gp_engine.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "graphgp/error.hpp"

namespace graphgp {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& psd) {
  if (psd.rows() != psd.cols()) throw ValidationError("expected a square matrix");
  if (!psd.allFinite()) throw NumericalError("matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(psd);
  if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  return {solver.eigenvectors(), solver.eigenvalues().cwiseMax(0.0)};
}

void Hyperparameters::validate() const {
  input.validate();
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw ValidationError("noise variance must be positive");
  }
}

std::string Hyperparameters::describe() const {
  std::ostringstream os;
  if (is_polynomial()) {
    os << "beta=(";
    const Eigen::VectorXd& b = polynomial().coefficients();
    for (Eigen::Index i = 0; i < b.size(); ++i) os << (i ? "," : "") << format_double(b(i));
    os << ")";
  } else {
    os << "kernel=" << to_string(baseline().kind) << " alpha=" << format_double(baseline().alpha)
       << " p=" << baseline().p;
  }
  if (input.has_lengthscale()) os << " lengthscale=" << format_double(input.lengthscale);
  os << " variance=" << format_double(input.variance)
     << " noise=" << format_double(noise_variance);
  return os.str();
}

void TrainingSet::validate(Eigen::Index nodes) const {
  if (signals.rows() < 1) throw ValidationError("training set is empty");
  if (signals.cols() != nodes) {
    throw ValidationError("signals have " + std::to_string(signals.cols()) +
                          " columns but the graph has " + std::to_string(nodes) + " nodes");
  }
  if (inputs.rows() != signals.rows()) {
    throw ValidationError("inputs and signals have different row counts");
  }
  if (!signals.allFinite() || !inputs.allFinite()) {
    throw ValidationError("training data has non-finite entries");
  }
}

Eigen::VectorXd vectorize(const Eigen::MatrixXd& signals) {
  Eigen::VectorXd out(signals.size());
  const Eigen::Index m = signals.cols();
  for (Eigen::Index n = 0; n < signals.rows(); ++n) out.segment(n * m, m) = signals.row(n).transpose();
  return out;
}

Eigen::MatrixXd unvectorize(const Eigen::VectorXd& stacked, Eigen::Index num_signals,
                            Eigen::Index num_nodes) {
  if (stacked.size() != num_signals * num_nodes) {
    throw ValidationError("stacked vector length does not match N * M");
  }
  Eigen::MatrixXd out(num_signals, num_nodes);
  for (Eigen::Index n = 0; n < num_signals; ++n) {
    out.row(n) = stacked.segment(n * num_nodes, num_nodes).transpose();
  }
  return out;
}

GraphContext::GraphContext(Graph graph)
    : baselines_(std::move(graph)), scaled_(decompose(baselines_.graph(), LaplacianVariant::scaled)) {}

SymmetricEigen GraphContext::output_gram_eigen(const OutputKernel& kernel) const {
  if (const auto* poly = std::get_if<PolynomialGraphFilter>(&kernel)) {
    const Eigen::VectorXd g = (*poly)(scaled_.eigenvalues);
    return {scaled_.eigenvectors, g.cwiseAbs2()};
  }
  const auto& b = std::get<BaselineGraphKernel>(kernel);
  baselines_.validate(b);
  const Eigen::Index m = num_nodes();
  switch (b.kind) {
    case BaselineKind::standard:
      return {Eigen::MatrixXd::Identity(m, m), Eigen::VectorXd::Ones(m)};
    case BaselineKind::local_averaging:
      return symmetric_eigen(baselines_.gram(b));
    case BaselineKind::laplacian_pseudoinverse: {
      const SpectralDecomposition& sd = baselines_.combinatorial();
      const double cutoff = 1e-10 * sd.eigenvalues.maxCoeff();
      const Eigen::VectorXd values =
          sd.eigenvalues.unaryExpr([cutoff](double l) { return l > cutoff ? 1.0 / l : 0.0; });
      return {sd.eigenvectors, values};
    }
    default: {
      LaplacianVariant variant{};
      baseline_response(b, 0.0, &variant);
      const SpectralDecomposition& sd = variant == LaplacianVariant::normalized
                                            ? baselines_.normalized()
                                            : baselines_.combinatorial();
      const Eigen::VectorXd values = sd.eigenvalues.unaryExpr(
          [&b](double l) { return std::max(0.0, baseline_response(b, l)); });
      return {sd.eigenvectors, values};
    }
  }
}

Eigen::MatrixXd GraphContext::output_gram(const OutputKernel& kernel) const {
  if (const auto* b = std::get_if<BaselineGraphKernel>(&kernel)) return baselines_.gram(*b);
  const SymmetricEigen e = output_gram_eigen(kernel);
  return e.vectors * e.values.asDiagonal() * e.vectors.transpose();
}

KroneckerSystem::KroneckerSystem(SymmetricEigen input, SymmetricEigen output, double noise)
    : input_(std::move(input)), output_(std::move(output)), noise_(noise) {
  variances_ = (input_.values * output_.values.transpose()).array() + noise_;
  if (!variances_.allFinite() || (variances_.array() <= 0.0).any()) {
    throw NumericalError("Kronecker covariance has a non-positive eigenvalue (noise=" +
                         format_double(noise) + ")");
  }
}

Eigen::MatrixXd KroneckerSystem::rotate(const Eigen::MatrixXd& signals) const {
  if (signals.rows() != num_signals() || signals.cols() != num_nodes()) {
    throw ValidationError("signal matrix shape does not match the covariance factors");
  }
  return input_.vectors.transpose() * signals * output_.vectors;
}

Eigen::MatrixXd KroneckerSystem::unrotate(const Eigen::MatrixXd& rotated) const {
  return input_.vectors * rotated * output_.vectors.transpose();
}

Eigen::MatrixXd KroneckerSystem::solve(const Eigen::MatrixXd& signals) const {
  return unrotate(rotate(signals).cwiseQuotient(variances_));
}

double KroneckerSystem::log_det() const { return variances_.array().log().sum(); }

double KroneckerSystem::log_likelihood(const Eigen::MatrixXd& signals) const {
  const Eigen::MatrixXd a = rotate(signals);
  const double quad = (a.array().square() / variances_.array()).sum();
  const double nm = static_cast<double>(variances_.size());
  return -0.5 * log_det() - 0.5 * quad - 0.5 * nm * kLog2Pi;
}

Eigen::MatrixXd full_covariance(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram,
                                double noise) {
  if (k.rows() != k.cols() || gram.rows() != gram.cols()) {
    throw ValidationError("covariance factors must be square");
  }
  const Eigen::Index n = k.rows();
  const Eigen::Index m = gram.rows();
  Eigen::MatrixXd sigma(n * m, n * m);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) sigma.block(a * m, b * m, m, m) = k(a, b) * gram;
  }
  sigma.diagonal().array() += noise;
  return sigma;
}

SolveResult kron_solve_and_logdet(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram,
                                  double noise, const Eigen::VectorXd& v) {
  const KroneckerSystem system(symmetric_eigen(k), symmetric_eigen(gram), noise);
  const Eigen::MatrixXd y = unvectorize(v, k.rows(), gram.rows());
  return {vectorize(system.solve(y)), system.log_det()};
}

double dense_log_marginal_likelihood(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gram,
                                     double noise, const Eigen::VectorXd& stacked) {
  if (k.rows() * gram.rows() > 400) {
    throw ValidationError("dense likelihood path is limited to N * M <= 400");
  }
  Eigen::MatrixXd sigma = full_covariance(k, gram, noise);
  if (stacked.size() != sigma.rows()) throw ValidationError("stacked vector length mismatch");
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("dense covariance is not positive definite");
  const Eigen::VectorXd z = llt.matrixL().solve(stacked);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double nm = static_cast<double>(stacked.size());
  return -0.5 * log_det - 0.5 * z.squaredNorm() - 0.5 * nm * kLog2Pi;
}

KroneckerSystem build_system(const Hyperparameters& h, const TrainingSet& data,
                             const GraphContext& ctx) {
  h.validate();
  data.validate(ctx.num_nodes());
  const Eigen::MatrixXd k = input_kernel_matrix(h.input, data.inputs, data.inputs);
  return KroneckerSystem(symmetric_eigen(k), ctx.output_gram_eigen(h.output), h.noise_variance);
}

double log_marginal_likelihood(const Hyperparameters& h, const TrainingSet& data,
                               const GraphContext& ctx) {
  const double value = build_system(h, data, ctx).log_likelihood(data.signals);
  if (!std::isfinite(value)) {
    throw NumericalError("log-marginal likelihood is not finite at " + h.describe());
  }
  return value;
}

Posterior posterior_predict(const KroneckerSystem& system, const Eigen::MatrixXd& signals,
                            const Eigen::MatrixXd& cross, const Eigen::VectorXd& test_prior) {
  if (system.num_signals() == 0) throw ValidationError("posterior needs training signals");
  if (cross.rows() != system.num_signals() || cross.cols() != test_prior.size()) {
    throw ValidationError("cross-covariance shape does not match training/test sizes");
  }
  const Eigen::MatrixXd& ub = system.output().vectors;
  const Eigen::VectorXd& lb = system.output().values;
  const Eigen::MatrixXd gram = ub * lb.asDiagonal() * ub.transpose();
  const Eigen::MatrixXd weights = system.solve(signals);
  const Eigen::MatrixXd rotated_cross = system.input().vectors.transpose() * cross;
  const Eigen::MatrixXd inv_var = system.variances().cwiseInverse();
  Posterior post;
  post.mean = cross.transpose() * weights * gram;
  post.covariance.reserve(static_cast<std::size_t>(test_prior.size()));
  for (Eigen::Index t = 0; t < test_prior.size(); ++t) {
    // reduction_j = sum_i kt_i^2 / d_ij
    const Eigen::VectorXd reduction =
        inv_var.transpose() * rotated_cross.col(t).cwiseAbs2();
    const Eigen::VectorXd spectrum =
        test_prior(t) * lb.array() - lb.array().square() * reduction.array();
    Eigen::MatrixXd cov = ub * spectrum.asDiagonal() * ub.transpose();
    cov.diagonal().array() += system.noise();
    post.covariance.push_back(0.5 * (cov + cov.transpose()));
  }
  return post;
}

Posterior posterior_predict(const Hyperparameters& h, const TrainingSet& data,
                            const GraphContext& ctx, const Eigen::MatrixXd& test_inputs) {
  const KroneckerSystem system = build_system(h, data, ctx);
  const Eigen::MatrixXd cross = input_kernel_matrix(h.input, data.inputs, test_inputs);
  Eigen::VectorXd prior(test_inputs.rows());
  for (Eigen::Index t = 0; t < test_inputs.rows(); ++t) {
    prior(t) = input_kernel_matrix(h.input, test_inputs.row(t), test_inputs.row(t))(0, 0);
  }
  return posterior_predict(system, data.signals, cross, prior);
}

double test_log_likelihood(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const Eigen::VectorXd& y) {
  const Eigen::Index m = mean.size();
  if (cov.rows() != m || cov.cols() != m || y.size() != m) {
    throw ValidationError("test log-likelihood dimensions disagree");
  }
  Eigen::MatrixXd jittered = cov;
  jittered.diagonal().array() += 1e-8 * cov.trace() / static_cast<double>(m);
  const Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("predictive covariance is not positive definite after jitter");
  }
  const Eigen::VectorXd z = llt.matrixL().solve(y - mean);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * z.squaredNorm() - 0.5 * log_det - 0.5 * static_cast<double>(m) * kLog2Pi;
}

double test_log_likelihood(const Posterior& posterior, const Eigen::MatrixXd& signals) {
  if (signals.rows() != posterior.size()) {
    throw ValidationError("number of test signals does not match the posterior");
  }
  double total = 0.0;
  for (Eigen::Index t = 0; t < signals.rows(); ++t) {
    total += test_log_likelihood(posterior.mean.row(t).transpose(),
                                 posterior.covariance[static_cast<std::size_t>(t)],
                                 signals.row(t).transpose());
  }
  return total;
}

Eigen::MatrixXd icm_gram_oracle(const Eigen::MatrixXd& b) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(b.rows(), b.rows());
  for (Eigen::Index i = 0; i < b.cols(); ++i) sum += b.col(i) * b.col(i).transpose();
  return sum;
}

}  // namespace graphgp
