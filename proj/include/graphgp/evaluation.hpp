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

#ifndef GRAPHGP_EVALUATION_HPP
#define GRAPHGP_EVALUATION_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphgp/gp_engine.hpp"

namespace graphgp {

/// Half-open [begin, end) index ranges.
using FoldRange = std::pair<Eigen::Index, Eigen::Index>;

/// `folds` contiguous ranges whose sizes differ by at most one.
std::vector<FoldRange> folds_by_count(Eigen::Index n, int folds);
/// Contiguous ranges of `size` items; a shorter remainder forms the last fold.
std::vector<FoldRange> folds_by_size(Eigen::Index n, Eigen::Index size);

struct FoldResult {
  int fold = 0;
  Eigen::Index size = 0;
  double log_likelihood = 0.0;
};

struct FoldMetrics {
  std::vector<FoldResult> folds;
  double mean = 0.0;
  // Sample standard deviation across folds over sqrt(#folds).
  double standard_error = 0.0;
  std::optional<std::string> warning;
};

/// Predictive log density of each row of `signals` under the posterior.
Eigen::VectorXd per_signal_log_likelihood(const Posterior& posterior,
                                          const Eigen::MatrixXd& signals);

/// Fold score = sum of the per-signal values in the fold.
FoldMetrics summarize_folds(const Eigen::VectorXd& per_signal,
                            const std::vector<FoldRange>& folds);

struct SpectrumRow {
  double lambda = 0.0;
  double value = 0.0;
  double scaled = 0.0;
  bool eigenvalue = false;
};

/// Spectral response of a fitted output kernel: a uniform grid with the given
/// step followed by the graph's eigenvalues. Polynomial kernels use the scaled
/// Laplacian and are scaled by their maximum over [0, 1]; baseline kernels use
/// the Laplacian their response is defined on and are scaled by their maximum
/// over the exported points.
std::vector<SpectrumRow> spectrum_export(const OutputKernel& kernel, const GraphContext& ctx,
                                         double step);

}  // namespace graphgp

#endif  // GRAPHGP_EVALUATION_HPP
