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

#ifndef GRAPHGP_TESTS_HELPERS_HPP
#define GRAPHGP_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "graphgp/graph.hpp"
#include "graphgp/kernels.hpp"

namespace graphgp::testing {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline double uniform(double lo, double hi, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Well-conditioned random PSD matrix A A^T / n + shift I.
inline Eigen::MatrixXd random_psd(Eigen::Index n, std::mt19937_64& rng, double shift = 0.1) {
  const Eigen::MatrixXd a = gaussian(n, n, rng);
  return a * a.transpose() / static_cast<double>(n) +
         shift * Eigen::MatrixXd::Identity(n, n);
}

/// Random connected weighted graph: a path backbone plus random chords.
inline Graph random_connected_graph(Eigen::Index m, std::mt19937_64& rng, double density = 0.4) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) a(i, i + 1) = a(i + 1, i) = uniform(0.2, 1.0, rng);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 2; j < m; ++j)
      if (uniform(0.0, 1.0, rng) < density) a(i, j) = a(j, i) = uniform(0.2, 1.0, rng);
  return Graph(a);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

/// Sup-norm over [0, 1] between two filters after each is divided by its
/// maximum on that interval.
inline double scaled_sup_distance(const PolynomialGraphFilter& a, const PolynomialGraphFilter& b,
                                  double step = 1e-3) {
  const PolynomialGraphFilter sa = scale_polynomial(a).filter;
  const PolynomialGraphFilter sb = scale_polynomial(b).filter;
  double worst = 0.0;
  const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int i = 0; i <= n; ++i) {
    const double x = std::min(1.0, i * step);
    worst = std::max(worst, std::abs(sa(x) - sb(x)));
  }
  return worst;
}

}  // namespace graphgp::testing

#endif  // GRAPHGP_TESTS_HELPERS_HPP
