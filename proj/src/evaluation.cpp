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

#include "graphgp/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "graphgp/error.hpp"

namespace graphgp {

std::vector<FoldRange> folds_by_count(Eigen::Index n, int folds) {
  if (folds < 1) throw ValidationError("fold count must be at least 1");
  if (folds > n) {
    throw ValidationError("fold count " + std::to_string(folds) + " exceeds the " +
                          std::to_string(n) + " test signals");
  }
  std::vector<FoldRange> out;
  const Eigen::Index base = n / folds;
  const Eigen::Index extra = n % folds;
  Eigen::Index begin = 0;
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index size = base + (f < extra ? 1 : 0);
    out.emplace_back(begin, begin + size);
    begin += size;
  }
  return out;
}

std::vector<FoldRange> folds_by_size(Eigen::Index n, Eigen::Index size) {
  if (size < 1) throw ValidationError("fold size must be at least 1");
  if (size > n) {
    throw ValidationError("fold size " + std::to_string(size) + " exceeds the " +
                          std::to_string(n) + " test signals");
  }
  std::vector<FoldRange> out;
  for (Eigen::Index b = 0; b < n; b += size) out.emplace_back(b, std::min(n, b + size));
  return out;
}

Eigen::VectorXd per_signal_log_likelihood(const Posterior& posterior,
                                          const Eigen::MatrixXd& signals) {
  if (signals.rows() != posterior.size() || signals.cols() != posterior.mean.cols()) {
    throw ValidationError("test signals do not match the posterior dimensions");
  }
  Eigen::VectorXd out(signals.rows());
  for (Eigen::Index t = 0; t < signals.rows(); ++t) {
    out(t) = test_log_likelihood(posterior.mean.row(t).transpose(),
                                 posterior.covariance[static_cast<std::size_t>(t)],
                                 signals.row(t).transpose());
  }
  return out;
}

FoldMetrics summarize_folds(const Eigen::VectorXd& per_signal,
                            const std::vector<FoldRange>& folds) {
  if (folds.empty()) throw ValidationError("no folds");
  FoldMetrics m;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto [b, e] = folds[f];
    if (b < 0 || e > per_signal.size() || b >= e) throw ValidationError("invalid fold range");
    m.folds.push_back({static_cast<int>(f), e - b, per_signal.segment(b, e - b).sum()});
  }
  const auto k = static_cast<double>(m.folds.size());
  for (const FoldResult& r : m.folds) m.mean += r.log_likelihood;
  m.mean /= k;
  if (m.folds.size() == 1) {
    m.standard_error = 0.0;
    m.warning = "single fold: standard error is undefined and reported as 0";
  } else {
    double ss = 0.0;
    for (const FoldResult& r : m.folds) ss += (r.log_likelihood - m.mean) * (r.log_likelihood - m.mean);
    m.standard_error = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
  }
  return m;
}

std::vector<SpectrumRow> spectrum_export(const OutputKernel& kernel, const GraphContext& ctx,
                                         double step) {
  if (!(step > 0.0) || step > 1.0) throw ValidationError("grid step must lie in (0, 1]");
  const auto points = static_cast<Eigen::Index>(std::floor(1.0 / step + 1e-9)) + 1;
  std::vector<SpectrumRow> rows;

  if (std::holds_alternative<PolynomialGraphFilter>(kernel)) {
    const PolynomialGraphFilter& f = std::get<PolynomialGraphFilter>(kernel);
    const double c = max_on_unit_interval(f);
    for (Eigen::Index k = 0; k < points; ++k) {
      const double l = std::min(1.0, static_cast<double>(k) * step);
      rows.push_back({l, f(l), 0.0, false});
    }
    for (Eigen::Index i = 0; i < ctx.scaled().size(); ++i) {
      const double l = ctx.scaled().eigenvalues(i);
      rows.push_back({l, f(l), 0.0, true});
    }
    for (SpectrumRow& r : rows) r.scaled = c > 0.0 ? r.value / c : r.value;
    return rows;
  }

  const BaselineGraphKernel& b = std::get<BaselineGraphKernel>(kernel);
  ctx.baselines().validate(b);
  LaplacianVariant variant = LaplacianVariant::combinatorial;
  baseline_response(b, 0.0, &variant);
  const SpectralDecomposition& sd = variant == LaplacianVariant::normalized
                                        ? ctx.baselines().normalized()
                                        : ctx.baselines().combinatorial();
  const double top = sd.eigenvalues.maxCoeff();
  auto response = [&](double l) {
    if (b.kind == BaselineKind::laplacian_pseudoinverse && l < 1e-10 * top) return 0.0;
    return baseline_response(b, l);
  };
  for (Eigen::Index k = 0; k < points; ++k) {
    const double l = std::min(1.0, static_cast<double>(k) * step) * top;
    rows.push_back({l, response(l), 0.0, false});
  }
  for (Eigen::Index i = 0; i < sd.size(); ++i) {
    const double l = sd.eigenvalues(i);
    rows.push_back({l, response(l), 0.0, true});
  }
  double c = 0.0;
  for (const SpectrumRow& r : rows) c = std::max(c, r.value);
  for (SpectrumRow& r : rows) r.scaled = c > 0.0 ? r.value / c : r.value;
  return rows;
}

}  // namespace graphgp
