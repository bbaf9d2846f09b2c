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

#include "graphgp/spectral_learner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "graphgp/random.hpp"

namespace graphgp {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);
constexpr double kInf = std::numeric_limits<double>::infinity();
// Keeps exp(Lambda') finite.
constexpr double kMaxLogMultiplier = 50.0;
constexpr double kMinRelativeNoise = 1e-10;
constexpr double kMaxStepGrowth = 1e6;

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double softplus_inverse(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Identifies the eigenbasis of BB^T so rotated data can be reused; -1 when
// the basis depends on alpha.
int basis_id(const OutputKernel& kernel) {
  if (std::holds_alternative<PolynomialGraphFilter>(kernel)) return 0;
  switch (std::get<BaselineGraphKernel>(kernel).kind) {
    case BaselineKind::standard: return 1;
    case BaselineKind::global_filtering:
    case BaselineKind::laplacian_pseudoinverse: return 2;
    case BaselineKind::local_averaging: return -1;
    default: return 3;
  }
}

double alpha_coordinate(const BaselineGraphKernel& b, const GraphContext& ctx) {
  if (b.kind == BaselineKind::p_step_random_walk) {
    return softplus_inverse(b.alpha - ctx.baselines().normalized_lambda_max());
  }
  return std::log(b.alpha);
}

double alpha_from_coordinate(BaselineKind kind, double coord, const GraphContext& ctx) {
  if (kind == BaselineKind::p_step_random_walk) {
    return ctx.baselines().normalized_lambda_max() + std::max(softplus(coord), 2e-8);
  }
  return std::exp(coord);
}

// Direction (V^T V)^{-1} g computed through the R factor of V = QR.
class BetaPreconditioner {
 public:
  BetaPreconditioner(const Eigen::MatrixXd& vandermonde_matrix, bool enabled) {
    if (!enabled) return;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vandermonde_matrix);
    const Eigen::Index p = vandermonde_matrix.cols();
    if (vandermonde_matrix.rows() < p) return;
    r_ = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    const Eigen::VectorXd diag = r_.diagonal().cwiseAbs();
    active_ = diag.minCoeff() > 1e-10 * diag.maxCoeff();
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& grad) const {
    if (!active_) return grad;
    const Eigen::VectorXd tmp = r_.transpose().triangularView<Eigen::Lower>().solve(grad);
    return r_.triangularView<Eigen::Upper>().solve(tmp);
  }

 private:
  Eigen::MatrixXd r_;
  bool active_ = false;
};

double min_spectrum(const PolynomialGraphFilter& f, const Eigen::VectorXd& eigenvalues) {
  return f(eigenvalues).minCoeff();
}

}  // namespace

void OptimizerConfig::validate() const {
  for (double r : {beta_rate, multiplier_rate, lengthscale_rate, noise_rate, alpha_rate,
                   variance_rate}) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("learning rates must be positive");
  }
  if (max_outer_iterations < 1 || inner_steps < 1 || max_halvings < 0 || patience < 1 ||
      unconstrained_iterations < 0) {
    throw ValidationError("iteration budgets must be positive");
  }
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_grid_candidates < 1) throw ValidationError("grid budget must be positive");
}

std::string_view to_string(SpectrumHint hint) {
  return hint == SpectrumHint::lowpass ? "lowpass" : "general";
}

SpectrumHint parse_spectrum_hint(std::string_view name) {
  if (name == "lowpass" || name == "low-pass") return SpectrumHint::lowpass;
  if (name == "general" || name == "bandpass" || name == "band-pass") return SpectrumHint::general;
  throw ValidationError("unknown spectrum hint '" + std::string(name) + "'");
}

ModelEvaluator::ModelEvaluator(const TrainingSet& data, const GraphContext& ctx)
    : data_(data), ctx_(ctx) {
  data_.validate(ctx.num_nodes());
}

const SymmetricEigen& ModelEvaluator::unit_input(const InputKernelConfig& cfg) {
  InputCache& c = input_cache_;
  bool hit = c.valid && c.kind == cfg.kind;
  if (hit && cfg.kind == InputKernelKind::squared_exponential) hit = c.lengthscale == cfg.lengthscale;
  if (hit && cfg.kind == InputKernelKind::precomputed) {
    hit = c.covariance.rows() == cfg.covariance.rows() &&
          c.covariance.cols() == cfg.covariance.cols() && c.covariance == cfg.covariance;
  }
  if (!hit) {
    InputKernelConfig unit = cfg;
    unit.variance = 1.0;
    c.unit = symmetric_eigen(input_kernel_matrix(unit, data_.inputs, data_.inputs));
    c.kind = cfg.kind;
    c.lengthscale = cfg.lengthscale;
    c.covariance = cfg.kind == InputKernelKind::precomputed ? cfg.covariance : Eigen::MatrixXd();
    c.valid = true;
    rotation_cache_.valid = false;
  }
  return c.unit;
}

double ModelEvaluator::negative_log_likelihood(const Hyperparameters& h) {
  h.validate();
  const SymmetricEigen& kin = unit_input(h.input);
  const SymmetricEigen out = ctx_.output_gram_eigen(h.output);
  const int basis = basis_id(h.output);
  RotationCache& rc = rotation_cache_;
  if (!(rc.valid && basis >= 0 && rc.basis == basis && rc.lengthscale == h.input.lengthscale)) {
    rc.rotated = kin.vectors.transpose() * data_.signals * out.vectors;
    rc.squared = rc.rotated.cwiseAbs2();
    rc.basis = basis;
    rc.lengthscale = h.input.lengthscale;
    rc.valid = true;
  }
  const Eigen::VectorXd lam_k = h.input.variance * kin.values;
  const Eigen::ArrayXXd d = ((lam_k * out.values.transpose()).array() + h.noise_variance);
  if (!d.allFinite() || (d <= 0.0).any()) {
    throw NumericalError("non-positive covariance eigenvalue at " + h.describe());
  }
  const double nm = static_cast<double>(d.size());
  const double value =
      0.5 * d.log().sum() + 0.5 * (rc.squared.array() / d).sum() + 0.5 * nm * kLog2Pi;
  if (!std::isfinite(value)) throw NumericalError("likelihood not finite at " + h.describe());
  return value;
}

double ModelEvaluator::negative_log_likelihood(const Hyperparameters& h, HyperGradient& grad) {
  const double value = negative_log_likelihood(h);
  const SymmetricEigen& kin = input_cache_.unit;
  const SymmetricEigen out = ctx_.output_gram_eigen(h.output);
  const RotationCache& rc = rotation_cache_;
  const Eigen::VectorXd lam_k = h.input.variance * kin.values;
  const Eigen::ArrayXXd d = ((lam_k * out.values.transpose()).array() + h.noise_variance);
  // d(-l)/d d_ij
  const Eigen::ArrayXXd coef = 0.5 / d - 0.5 * rc.squared.array() / d.square();

  grad = HyperGradient{};
  grad.log_noise = h.noise_variance * coef.sum();

  // Sigma^{-1} y in matrix form, needed by terms whose derivative is not
  // diagonal in the current basis.
  Eigen::MatrixXd weights;
  auto solved = [&]() -> const Eigen::MatrixXd& {
    if (weights.size() == 0) {
      weights = kin.vectors * (rc.rotated.array() / d).matrix() * out.vectors.transpose();
    }
    return weights;
  };

  if (h.is_polynomial()) {
    const PolynomialGraphFilter& f = h.polynomial();
    const Eigen::VectorXd& lam = ctx_.scaled().eigenvalues;
    const Eigen::VectorXd g = f(lam);
    const Eigen::VectorXd per_node = coef.matrix().transpose() * lam_k;
    grad.beta = vandermonde(lam, f.degree()).transpose() * (2.0 * per_node.cwiseProduct(g));
  } else {
    const BaselineGraphKernel& b = h.baseline();
    grad.log_variance = (coef.matrix().array() *
                         (lam_k * out.values.transpose()).array()).sum();
    if (uses_alpha(b.kind)) {
      const Eigen::MatrixXd dgram = ctx_.baselines().gram_alpha_derivative(b);
      const Eigen::VectorXd dspec =
          (out.vectors.transpose() * dgram * out.vectors).diagonal();
      const double trace = ((lam_k * dspec.transpose()).array() / d).sum();
      const Eigen::MatrixXd& w = solved();
      const Eigen::MatrixXd k = kin.vectors * lam_k.asDiagonal() * kin.vectors.transpose();
      const double quad = (w.array() * (k * w * dgram).array()).sum();
      double dalpha = 0.5 * trace - 0.5 * quad;
      if (b.kind == BaselineKind::p_step_random_walk) {
        dalpha *= sigmoid(softplus_inverse(b.alpha - ctx_.baselines().normalized_lambda_max()));
      } else {
        dalpha *= b.alpha;
      }
      grad.alpha = dalpha;
    }
  }

  if (h.input.has_lengthscale()) {
    const Eigen::MatrixXd dk =
        input_kernel_log_lengthscale_derivative(h.input, data_.inputs);
    const Eigen::VectorXd dspec = (kin.vectors.transpose() * dk * kin.vectors).diagonal();
    const double trace = ((dspec * out.values.transpose()).array() / d).sum();
    const Eigen::MatrixXd& w = solved();
    const Eigen::MatrixXd gram = out.vectors * out.values.asDiagonal() * out.vectors.transpose();
    const double quad = (w.array() * (dk * w * gram).array()).sum();
    grad.log_lengthscale = 0.5 * trace - 0.5 * quad;
  }

  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(grad.log_noise) || !finite(grad.alpha) || !finite(grad.log_variance) ||
      !finite(grad.log_lengthscale) || (grad.beta.size() > 0 && !grad.beta.allFinite())) {
    throw NumericalError("gradient not finite at " + h.describe());
  }
  return value;
}

HyperGradient nll_gradient(const Hyperparameters& h, const TrainingSet& data,
                           const GraphContext& ctx) {
  ModelEvaluator evaluator(data, ctx);
  HyperGradient grad;
  evaluator.negative_log_likelihood(h, grad);
  return grad;
}

double lagrangian(const Eigen::VectorXd& beta, const LagrangeState& lagrange,
                  const Hyperparameters& h, const TrainingSet& data, const GraphContext& ctx) {
  if (lagrange.log_multipliers.size() != ctx.num_nodes()) {
    throw ValidationError("one Lagrange multiplier per eigenvalue is required");
  }
  Hyperparameters hb = h;
  hb.output = PolynomialGraphFilter(beta);
  ModelEvaluator evaluator(data, ctx);
  const double nll = evaluator.negative_log_likelihood(hb);
  const Eigen::VectorXd spectrum =
      vandermonde(ctx.scaled().eigenvalues, static_cast<int>(beta.size()) - 1) * beta;
  const double value = nll - lagrange.multipliers().dot(spectrum);
  if (!std::isfinite(value)) throw NumericalError("Lagrangian not finite at " + hb.describe());
  return value;
}

FitReport constrained_fit(const TrainingSet& data, const GraphContext& ctx, int degree,
                          const OptimizerConfig& cfg, const Hyperparameters& init) {
  cfg.validate();
  if (!init.is_polynomial()) throw ValidationError("constrained fit needs a polynomial kernel");
  if (init.polynomial().degree() != degree) {
    throw ValidationError("initial polynomial degree does not match the requested degree");
  }
  init.validate();

  ModelEvaluator evaluator(data, ctx);
  const Eigen::VectorXd& lam = ctx.scaled().eigenvalues;
  const Eigen::MatrixXd vand = vandermonde(lam, degree);
  const BetaPreconditioner precond(vand, cfg.precondition);

  Hyperparameters h = init;
  Eigen::VectorXd beta = init.polynomial().coefficients();
  LagrangeState lagrange = LagrangeState::zeros(ctx.num_nodes());

  FitReport report;
  report.constrained = true;

  Eigen::VectorXd multipliers;
  auto objective = [&](const Eigen::VectorXd& b, Eigen::VectorXd* grad, double* nll_out) {
    h.output = PolynomialGraphFilter(b);
    double nll = 0.0;
    if (grad != nullptr) {
      HyperGradient g;
      nll = evaluator.negative_log_likelihood(h, g);
      *grad = g.beta - vand.transpose() * multipliers;
    } else {
      nll = evaluator.negative_log_likelihood(h);
    }
    if (nll_out != nullptr) *nll_out = nll;
    return nll - multipliers.dot(vand * b);
  };

  double step = cfg.beta_rate;
  double previous = kInf;
  // The dual iterations can cycle between nearby feasible and infeasible
  // points; the best feasible iterate is kept as a fallback.
  Eigen::VectorXd best_feasible;
  double best_feasible_nll = kInf;
  int calm = 0;
  for (int outer = 1; outer <= cfg.max_outer_iterations; ++outer) {
    multipliers = lagrange.multipliers();
    Eigen::VectorXd grad;
    double nll = 0.0;
    double value = 0.0;
    try {
      value = objective(beta, &grad, &nll);
    } catch (const NumericalError& e) {
      throw FitDivergedError(std::string("constrained fit diverged: ") + e.what(), report.trace);
    }

    for (int s = 0; s < cfg.inner_steps; ++s) {
      const Eigen::VectorXd direction = precond.apply(grad);
      bool accepted = false;
      for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
        const Eigen::VectorXd candidate = beta - step * direction;
        Eigen::VectorXd cand_grad;
        double cand_nll = 0.0;
        double cand_value = kInf;
        try {
          cand_value = objective(candidate, &cand_grad, &cand_nll);
        } catch (const NumericalError&) {
          cand_value = kInf;
        }
        if (std::isfinite(cand_value) && cand_value < value) {
          beta = candidate;
          grad = cand_grad;
          value = cand_value;
          nll = cand_nll;
          accepted = true;
          step = std::min(2.0 * step, kMaxStepGrowth * cfg.beta_rate);
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        step = cfg.beta_rate;
        break;
      }
    }

    const Eigen::VectorXd spectrum = vand * beta;
    if (!std::isfinite(value)) {
      throw FitDivergedError("constrained fit diverged: Lagrangian is not finite", report.trace);
    }
    report.trace.push_back({outer, value, nll, std::max(0.0, -spectrum.minCoeff())});
    if (spectrum.minCoeff() >= 0.0 && nll < best_feasible_nll) {
      best_feasible_nll = nll;
      best_feasible = beta;
    }
    report.iterations = outer;

    // Ascent on Lambda' along dL/dLambda = -B_v beta. Stepping along dL/dLambda'
    // = -Lambda (B_v beta) instead lets a multiplier that has collapsed towards
    // zero stay there even after its constraint becomes violated.
    lagrange.log_multipliers -= cfg.multiplier_rate * spectrum;
    lagrange.log_multipliers =
        lagrange.log_multipliers.cwiseMin(kMaxLogMultiplier).cwiseMax(-kMaxLogMultiplier);

    if (std::abs(value - previous) < cfg.tolerance) {
      if (++calm >= cfg.patience) {
        report.converged = true;
        break;
      }
    } else {
      calm = 0;
    }
    previous = value;
  }

  PolynomialGraphFilter result(beta);
  if (min_spectrum(result, lam) < 0.0 && best_feasible.size() > 0) {
    result = PolynomialGraphFilter(best_feasible);
  }
  const double lowest = min_spectrum(result, lam);
  if (lowest < 0.0) {
    Eigen::VectorXd shifted = beta;
    shifted(0) -= lowest;
    result = PolynomialGraphFilter(shifted);
    report.feasibility_shift = -lowest;
  }
  h.output = result;
  report.hyperparameters = h;
  report.lagrange = lagrange;
  report.min_spectrum = min_spectrum(result, lam);
  report.feasible = report.min_spectrum >= -1e-8;
  report.log_likelihood = -evaluator.negative_log_likelihood(h);
  return report;
}

namespace {

// Flat view of the free hyperparameters as named blocks.
struct Block {
  enum Kind { beta, log_noise, log_lengthscale, alpha, log_variance } kind;
  Eigen::Index offset = 0;
  Eigen::Index size = 1;
  double rate = 1.0;
};

std::vector<Block> make_blocks(const Hyperparameters& h, const OptimizerConfig& cfg) {
  std::vector<Block> blocks;
  Eigen::Index offset = 0;
  auto add = [&](Block::Kind kind, Eigen::Index size, double rate) {
    blocks.push_back({kind, offset, size, rate});
    offset += size;
  };
  if (h.is_polynomial()) {
    add(Block::beta, h.polynomial().coefficients().size(), cfg.beta_rate);
  } else {
    if (uses_alpha(h.baseline().kind)) add(Block::alpha, 1, cfg.alpha_rate);
    add(Block::log_variance, 1, cfg.variance_rate);
  }
  add(Block::log_noise, 1, cfg.noise_rate);
  if (h.input.has_lengthscale()) add(Block::log_lengthscale, 1, cfg.lengthscale_rate);
  return blocks;
}

Eigen::VectorXd pack(const Hyperparameters& h, const std::vector<Block>& blocks,
                     const GraphContext& ctx) {
  Eigen::Index total = 0;
  for (const Block& b : blocks) total += b.size;
  Eigen::VectorXd theta(total);
  for (const Block& b : blocks) {
    switch (b.kind) {
      case Block::beta: theta.segment(b.offset, b.size) = h.polynomial().coefficients(); break;
      case Block::log_noise: theta(b.offset) = std::log(h.noise_variance); break;
      case Block::log_lengthscale: theta(b.offset) = std::log(h.input.lengthscale); break;
      case Block::alpha: theta(b.offset) = alpha_coordinate(h.baseline(), ctx); break;
      case Block::log_variance: theta(b.offset) = std::log(h.input.variance); break;
    }
  }
  return theta;
}

Hyperparameters unpack(const Eigen::VectorXd& theta, const Hyperparameters& like,
                       const std::vector<Block>& blocks, const GraphContext& ctx) {
  Hyperparameters h = like;
  for (const Block& b : blocks) {
    switch (b.kind) {
      case Block::beta:
        h.output = PolynomialGraphFilter(Eigen::VectorXd(theta.segment(b.offset, b.size)));
        break;
      case Block::log_noise: h.noise_variance = std::exp(theta(b.offset)); break;
      case Block::log_lengthscale: h.input.lengthscale = std::exp(theta(b.offset)); break;
      case Block::alpha: {
        BaselineGraphKernel k = like.baseline();
        k.alpha = alpha_from_coordinate(k.kind, theta(b.offset), ctx);
        h.output = k;
        break;
      }
      case Block::log_variance: h.input.variance = std::exp(theta(b.offset)); break;
    }
  }
  return h;
}

Eigen::VectorXd pack_gradient(const HyperGradient& g, const std::vector<Block>& blocks,
                              Eigen::Index total) {
  Eigen::VectorXd out(total);
  for (const Block& b : blocks) {
    switch (b.kind) {
      case Block::beta: out.segment(b.offset, b.size) = g.beta; break;
      case Block::log_noise: out(b.offset) = g.log_noise; break;
      case Block::log_lengthscale: out(b.offset) = g.log_lengthscale; break;
      case Block::alpha: out(b.offset) = g.alpha; break;
      case Block::log_variance: out(b.offset) = g.log_variance; break;
    }
  }
  return out;
}

}  // namespace

UnconstrainedResult unconstrained_fit(const TrainingSet& data, const GraphContext& ctx,
                                      int degree, const OptimizerConfig& cfg,
                                      const Hyperparameters& init) {
  cfg.validate();
  init.validate();
  if (init.is_polynomial() && init.polynomial().degree() != degree) {
    throw ValidationError("initial polynomial degree does not match the requested degree");
  }
  if (!init.is_polynomial()) ctx.baselines().validate(init.baseline());

  ModelEvaluator evaluator(data, ctx);
  const std::vector<Block> blocks = make_blocks(init, cfg);
  Eigen::VectorXd theta = pack(init, blocks, ctx);
  const Eigen::Index total = theta.size();
  const BetaPreconditioner precond(
      vandermonde(ctx.scaled().eigenvalues, init.is_polynomial() ? degree : 0),
      cfg.precondition && init.is_polynomial());

  // Keeps the noise away from underflow when the likelihood keeps rising as
  // it shrinks.
  const double noise_floor = kMinRelativeNoise * std::max(data.signals.squaredNorm() /
                                                              static_cast<double>(data.signals.size()),
                                                          std::numeric_limits<double>::min());
  const double min_noise = std::min(noise_floor, init.noise_variance);
  auto evaluate = [&](const Eigen::VectorXd& t, Eigen::VectorXd* grad) {
    const Hyperparameters h = unpack(t, init, blocks, ctx);
    if (!(h.noise_variance >= min_noise)) throw NumericalError("noise below floor");
    if (grad == nullptr) return evaluator.negative_log_likelihood(h);
    HyperGradient g;
    const double v = evaluator.negative_log_likelihood(h, g);
    *grad = pack_gradient(g, blocks, total);
    return v;
  };

  UnconstrainedResult result;
  Eigen::VectorXd grad;
  double value = evaluate(theta, &grad);
  result.trace.push_back(-value);

  std::vector<double> steps;
  for (const Block& b : blocks) steps.push_back(b.rate);

  int calm = 0;
  for (int it = 1; it <= cfg.unconstrained_iterations; ++it) {
    const double start = value;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const Block& b = blocks[bi];
      Eigen::VectorXd direction = grad.segment(b.offset, b.size);
      if (b.kind == Block::beta) direction = precond.apply(direction);
      bool accepted = false;
      for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
        Eigen::VectorXd candidate = theta;
        candidate.segment(b.offset, b.size) -= steps[bi] * direction;
        Eigen::VectorXd cand_grad;
        double cand_value = kInf;
        try {
          cand_value = evaluate(candidate, &cand_grad);
        } catch (const Error&) {
          cand_value = kInf;
        }
        if (std::isfinite(cand_value) && cand_value < value) {
          theta = candidate;
          grad = cand_grad;
          value = cand_value;
          accepted = true;
          steps[bi] = std::min(2.0 * steps[bi], kMaxStepGrowth * b.rate);
          break;
        }
        steps[bi] *= 0.5;
      }
      if (!accepted) steps[bi] = b.rate;
    }
    result.trace.push_back(-value);
    result.iterations = it;
    if (std::abs(start - value) < cfg.tolerance) {
      if (++calm >= cfg.patience) {
        result.converged = true;
        break;
      }
    } else {
      calm = 0;
    }
  }

  if (!std::isfinite(value)) throw NumericalError("unconstrained fit diverged");
  result.hyperparameters = unpack(theta, init, blocks, ctx);
  return result;
}

double signal_variance(const Eigen::MatrixXd& signals) {
  if (signals.size() == 0) throw ValidationError("no signals");
  const double mean = signals.mean();
  return (signals.array() - mean).square().mean();
}

double mean_squared_norm(const Eigen::MatrixXd& signals) {
  if (signals.rows() == 0) throw ValidationError("no signals");
  return signals.rowwise().squaredNorm().mean();
}

PolynomialGraphFilter canonical_sign(const PolynomialGraphFilter& f,
                                     const Eigen::VectorXd& eigenvalues) {
  if (f(eigenvalues).sum() < 0.0) return PolynomialGraphFilter(Eigen::VectorXd(-f.coefficients()));
  return f;
}

Initialization initialize_hyperparameters(const TrainingSet& data, const GraphContext& ctx,
                                          int degree, SpectrumHint hint,
                                          const InputKernelConfig& input_template,
                                          const OptimizerConfig& cfg) {
  cfg.validate();
  if (degree < 0) throw ValidationError("polynomial degree must be non-negative");
  data.validate(ctx.num_nodes());
  if (data.size() < 2) throw ValidationError("initialization needs at least two signals");

  InitializationRecord record;
  record.signal_variance = signal_variance(data.signals);
  if (!(record.signal_variance > 0.0) || !std::isfinite(record.signal_variance)) {
    throw ValidationError("degenerate data: signal variance is zero");
  }

  Hyperparameters h;
  h.input = input_template;
  h.input.variance = 1.0;
  if (h.input.has_lengthscale()) {
    h.input.lengthscale = mean_squared_norm(data.signals);
    if (!(h.input.lengthscale > 0.0)) throw ValidationError("degenerate data: zero signal norms");
    record.lengthscale = h.input.lengthscale;
  }

  std::vector<double> values;
  if (hint == SpectrumHint::lowpass) {
    for (int v = -5; v <= 5; ++v) values.push_back(v);
  } else {
    for (int v = -10; v <= 10; v += 2) values.push_back(v);
  }
  const std::vector<double> noises = {record.signal_variance / 10.0, record.signal_variance / 5.0};
  const auto base = static_cast<double>(values.size());
  const int width = degree + 1;
  const double full = std::pow(base, width);
  record.sampled = full > static_cast<double>(cfg.max_grid_candidates);
  const std::size_t count =
      record.sampled ? cfg.max_grid_candidates : static_cast<std::size_t>(full);
  record.grid_size = count * noises.size();

  ModelEvaluator evaluator(data, ctx);
  auto rng = make_stream(cfg.seed, 0x67726964ULL);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<std::size_t> digits(static_cast<std::size_t>(width), 0);

  bool have_best = false;
  record.candidates.reserve(record.grid_size);
  for (std::size_t c = 0; c < count; ++c) {
    if (record.sampled) {
      for (auto& d : digits) d = pick(rng);
    } else if (c > 0) {
      for (std::size_t pos = 0; pos < digits.size(); ++pos) {
        if (++digits[pos] < values.size()) break;
        digits[pos] = 0;
      }
    }
    Eigen::VectorXd beta(width);
    for (int i = 0; i < width; ++i) beta(i) = values[digits[static_cast<std::size_t>(i)]];
    h.output = PolynomialGraphFilter(beta);
    for (double noise : noises) {
      h.noise_variance = noise;
      double ll = -kInf;
      try {
        ll = -evaluator.negative_log_likelihood(h);
      } catch (const NumericalError&) {
        ll = -kInf;
      }
      record.candidates.push_back({beta, noise, ll});
      if (!std::isfinite(ll)) continue;
      const GridCandidate& cand = record.candidates.back();
      if (!have_best || ll > record.best.log_likelihood ||
          (ll == record.best.log_likelihood && beta.norm() < record.best.beta.norm())) {
        record.best = cand;
        have_best = true;
      }
    }
  }
  if (!have_best) throw NumericalError("every grid candidate failed to evaluate");

  const Eigen::VectorXd& lam = ctx.scaled().eigenvalues;
  h.output = canonical_sign(PolynomialGraphFilter(record.best.beta), lam);
  h.noise_variance = record.best.noise_variance;

  UnconstrainedResult refined = unconstrained_fit(data, ctx, degree, cfg, h);
  Hyperparameters out = refined.hyperparameters;
  out.output = canonical_sign(out.polynomial(), lam);
  record.refined_log_likelihood = refined.trace.back();
  return {out, std::move(record)};
}

FitReport fit_polynomial(const TrainingSet& data, const GraphContext& ctx, int degree,
                         SpectrumHint hint, const InputKernelConfig& input_template,
                         const OptimizerConfig& cfg, bool constrained) {
  Initialization init =
      initialize_hyperparameters(data, ctx, degree, hint, input_template, cfg);
  FitReport report;
  if (constrained) {
    report = constrained_fit(data, ctx, degree, cfg, init.hyperparameters);
  } else {
    const Eigen::VectorXd& lam = ctx.scaled().eigenvalues;
    report.hyperparameters = init.hyperparameters;
    report.constrained = false;
    report.converged = true;
    report.log_likelihood = init.record.refined_log_likelihood;
    report.min_spectrum = min_spectrum(init.hyperparameters.polynomial(), lam);
    report.feasible = report.min_spectrum >= -1e-8;
    report.lagrange = LagrangeState::zeros(ctx.num_nodes());
  }
  report.initialization = std::move(init.record);
  return report;
}

UnconstrainedResult fit_baseline(const TrainingSet& data, const GraphContext& ctx,
                                 BaselineGraphKernel kernel,
                                 const InputKernelConfig& input_template,
                                 const OptimizerConfig& cfg) {
  data.validate(ctx.num_nodes());
  const double var = signal_variance(data.signals);
  if (!(var > 0.0)) throw ValidationError("degenerate data: signal variance is zero");

  Hyperparameters h;
  h.input = input_template;
  h.input.variance = var;
  if (h.input.has_lengthscale()) h.input.lengthscale = mean_squared_norm(data.signals);

  std::vector<double> alphas = {1.0};
  if (uses_alpha(kernel.kind)) {
    alphas = {0.1, 1.0, 10.0};
    if (kernel.kind == BaselineKind::p_step_random_walk) {
      const double lmax = ctx.baselines().normalized_lambda_max();
      for (double& a : alphas) a += lmax;
    }
  }

  ModelEvaluator evaluator(data, ctx);
  double best = kInf;
  Hyperparameters start = h;
  for (double a : alphas) {
    for (double noise : {var / 10.0, var / 5.0}) {
      Hyperparameters cand = h;
      BaselineGraphKernel k = kernel;
      k.alpha = a;
      cand.output = k;
      cand.noise_variance = noise;
      double v = kInf;
      try {
        v = evaluator.negative_log_likelihood(cand);
      } catch (const NumericalError&) {
        v = kInf;
      }
      if (v < best) {
        best = v;
        start = cand;
      }
    }
  }
  if (!std::isfinite(best)) throw NumericalError("no baseline starting point could be evaluated");
  return unconstrained_fit(data, ctx, 0, cfg, start);
}

}  // namespace graphgp
