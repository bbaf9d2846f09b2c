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

#include "graphgp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include <Eigen/Eigenvalues>

#include "graphgp/error.hpp"
#include "graphgp/random.hpp"

namespace graphgp {

Graph::Graph(Eigen::MatrixXd adjacency) : adjacency_(std::move(adjacency)) {
  const Eigen::Index m = adjacency_.rows();
  if (adjacency_.cols() != m) throw ValidationError("adjacency must be square");
  if (m < 2) throw ValidationError("a graph needs at least 2 nodes");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (adjacency_(i, i) != 0.0) throw ValidationError("adjacency diagonal must be zero");
    for (Eigen::Index j = 0; j < m; ++j) {
      const double w = adjacency_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("edge weights must be finite and non-negative");
      }
      if (w != adjacency_(j, i)) throw ValidationError("adjacency must be symmetric");
    }
  }
}

Eigen::Index Graph::num_edges() const {
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < num_nodes(); ++i) {
    for (Eigen::Index j = i + 1; j < num_nodes(); ++j) {
      if (adjacency_(i, j) > 0.0) ++count;
    }
  }
  return count;
}

bool Graph::is_connected() const {
  const Eigen::Index m = num_nodes();
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = 1;
  Eigen::Index reached = 1;
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < m; ++v) {
      if (adjacency_(u, v) > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == m;
}

std::string_view to_string(LaplacianVariant variant) {
  switch (variant) {
    case LaplacianVariant::combinatorial: return "combinatorial";
    case LaplacianVariant::normalized: return "normalized";
    case LaplacianVariant::scaled: return "scaled";
  }
  return "unknown";
}

LaplacianVariant parse_laplacian_variant(std::string_view name) {
  if (name == "combinatorial") return LaplacianVariant::combinatorial;
  if (name == "normalized") return LaplacianVariant::normalized;
  if (name == "scaled") return LaplacianVariant::scaled;
  throw ValidationError("unknown Laplacian variant '" + std::string(name) + "'");
}

Eigen::MatrixXd SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

Eigen::MatrixXd laplacian(const Graph& graph, LaplacianVariant variant) {
  const Eigen::MatrixXd& a = graph.adjacency();
  const Eigen::VectorXd deg = graph.degrees();
  Eigen::MatrixXd lap = -a;
  lap.diagonal() = deg;

  switch (variant) {
    case LaplacianVariant::combinatorial:
      return lap;
    case LaplacianVariant::normalized: {
      const Eigen::Index m = graph.num_nodes();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!(deg(i) > 0.0)) {
          throw DegreeZeroError("node " + std::to_string(i) +
                                " has degree zero; normalized Laplacian undefined");
        }
      }
      Eigen::MatrixXd norm(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          // d_i * d_j is commutative, which keeps the result exactly symmetric.
          norm(i, j) = lap(i, j) / std::sqrt(deg(i) * deg(j));
        }
      }
      return norm;
    }
    case LaplacianVariant::scaled: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) {
        throw ConvergenceError("eigensolver failed while scaling the Laplacian");
      }
      const double lmax = solver.eigenvalues().maxCoeff();
      if (!(lmax > 0.0)) throw ValidationError("graph has no edges; scaled Laplacian undefined");
      return lap / lmax;
    }
  }
  throw ValidationError("unknown Laplacian variant");
}

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& laplacian_matrix,
                                     LaplacianVariant variant) {
  const Eigen::Index m = laplacian_matrix.rows();
  if (laplacian_matrix.cols() != m || m == 0) {
    throw ValidationError("Laplacian must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, laplacian_matrix.cwiseAbs().maxCoeff());
  if ((laplacian_matrix - laplacian_matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("Laplacian must be symmetric");
  }
  if (!laplacian_matrix.allFinite()) throw ValidationError("Laplacian has non-finite entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_matrix);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("symmetric eigensolver did not converge");
  }

  SpectralDecomposition sd;
  sd.variant = variant;
  sd.eigenvalues = solver.eigenvalues();
  sd.eigenvectors = solver.eigenvectors();

  const double upper = variant == LaplacianVariant::scaled ? 1.0
                                                            : std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    sd.eigenvalues(i) = std::clamp(sd.eigenvalues(i), 0.0, upper);

    Eigen::Index arg = 0;
    sd.eigenvectors.col(i).cwiseAbs().maxCoeff(&arg);
    if (sd.eigenvectors(arg, i) < 0.0) sd.eigenvectors.col(i) *= -1.0;
  }
  return sd;
}

Eigen::VectorXd graph_fourier_transform(const SpectralDecomposition& sd,
                                        const Eigen::Ref<const Eigen::VectorXd>& signal) {
  if (signal.size() != sd.size()) {
    throw ValidationError("signal length " + std::to_string(signal.size()) +
                          " does not match graph size " + std::to_string(sd.size()));
  }
  return sd.eigenvectors.transpose() * signal;
}

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& coords) {
  const Eigen::Index m = coords.rows();
  Eigen::MatrixXd dist(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      dist(i, j) = (coords.row(i) - coords.row(j)).norm();
    }
  }
  return dist;
}

}  // namespace

Graph knn_graph(const Eigen::MatrixXd& coords, int k) {
  const Eigen::Index m = coords.rows();
  if (k <= 0 || k >= m) {
    throw ValidationError("k must satisfy 0 < k < number of points (k=" + std::to_string(k) +
                          ", points=" + std::to_string(m) + ")");
  }
  if (!coords.allFinite()) throw ValidationError("coordinates must be finite");
  const Eigen::MatrixXd dist = pairwise_distances(coords);

  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(m, m);
  double dist_sum = 0.0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m - 1));
  for (Eigen::Index i = 0; i < m; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i) order.push_back(j);
    }
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return dist(i, a) < dist(i, b);
    });
    for (int n = 0; n < k; ++n) {
      const Eigen::Index j = order[static_cast<std::size_t>(n)];
      mask(i, j) = 1.0;
      mask(j, i) = 1.0;
      dist_sum += dist(i, j);
    }
  }

  const double sigma = dist_sum / static_cast<double>(m * k);
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (mask(i, j) == 0.0) continue;
      if (sigma > 0.0) {
        const double d = dist(i, j);
        adjacency(i, j) = std::exp(-d * d / (2.0 * sigma * sigma));
      } else {
        adjacency(i, j) = 1.0;
      }
    }
  }
  return Graph(std::move(adjacency));
}

Graph threshold_graph(const Eigen::MatrixXd& coords, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("threshold must be positive");
  const Eigen::Index m = coords.rows();
  const Eigen::MatrixXd dist = pairwise_distances(coords);
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = dist(i, j);
      if (d == 0.0) {
        throw ValidationError("points " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide; inverse-distance weight undefined");
      }
      if (d < threshold) {
        adjacency(i, j) = 1.0 / d;
        adjacency(j, i) = adjacency(i, j);
      }
    }
  }
  return Graph(std::move(adjacency));
}

namespace {

constexpr int kMaxGraphAttempts = 50;

Graph sensor_attempt(const RandomGraphParams& params, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd coords(params.num_nodes, 2);
  for (int i = 0; i < params.num_nodes; ++i) {
    coords(i, 0) = unit(rng);
    coords(i, 1) = unit(rng);
  }
  return knn_graph(coords, params.neighbours);
}

// Preferential attachment: a new node links to `attach` distinct existing
// nodes, each drawn with probability proportional to degree + 1.
Graph barabasi_albert_attempt(const RandomGraphParams& params, std::mt19937_64& rng) {
  const int n = params.num_nodes;
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (int node = params.initial_nodes; node < n; ++node) {
    std::vector<double> weight(degree.begin(), degree.begin() + node);
    for (double& w : weight) w += 1.0;
    for (int e = 0; e < params.attach; ++e) {
      std::discrete_distribution<int> pick(weight.begin(), weight.end());
      const int target = pick(rng);
      weight[static_cast<std::size_t>(target)] = 0.0;
      adjacency(node, target) = 1.0;
      adjacency(target, node) = 1.0;
      degree[static_cast<std::size_t>(target)] += 1.0;
      degree[static_cast<std::size_t>(node)] += 1.0;
    }
  }
  return Graph(std::move(adjacency));
}

}  // namespace

Graph random_graph(const RandomGraphParams& params, std::uint64_t seed) {
  switch (params.kind) {
    case RandomGraphKind::sensor:
      if (params.num_nodes < 2 || params.neighbours <= 0 || params.neighbours >= params.num_nodes) {
        throw ValidationError("sensor graph needs 0 < neighbours < num_nodes");
      }
      break;
    case RandomGraphKind::barabasi_albert:
      if (params.attach <= 0 || params.initial_nodes < params.attach ||
          params.num_nodes <= params.initial_nodes) {
        throw ValidationError(
            "Barabasi-Albert graph needs 0 < attach <= initial_nodes < num_nodes");
      }
      break;
  }

  for (int attempt = 0; attempt < kMaxGraphAttempts; ++attempt) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(attempt));
    Graph g = params.kind == RandomGraphKind::sensor ? sensor_attempt(params, rng)
                                                     : barabasi_albert_attempt(params, rng);
    if (g.is_connected()) return g;
  }
  throw ValidationError("no connected graph after " + std::to_string(kMaxGraphAttempts) +
                        " attempts; parameters are likely infeasible");
}

}  // namespace graphgp
