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

#ifndef GRAPHGP_GRAPH_HPP
#define GRAPHGP_GRAPH_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace graphgp {

/// Weighted undirected graph on M >= 2 nodes.
///
/// The adjacency is validated on construction: exactly symmetric, zero
/// diagonal, finite non-negative weights. Instances are immutable.
class Graph {
 public:
  explicit Graph(Eigen::MatrixXd adjacency);

  Eigen::Index num_nodes() const { return adjacency_.rows(); }
  const Eigen::MatrixXd& adjacency() const { return adjacency_; }
  Eigen::VectorXd degrees() const { return adjacency_.rowwise().sum(); }

  Eigen::Index num_edges() const;
  bool is_connected() const;

 private:
  Eigen::MatrixXd adjacency_;
};

enum class LaplacianVariant { combinatorial, normalized, scaled };

std::string_view to_string(LaplacianVariant variant);
LaplacianVariant parse_laplacian_variant(std::string_view name);

/// Eigenpairs of a Laplacian, eigenvalues ascending, column i of
/// `eigenvectors` paired with `eigenvalues[i]`.
struct SpectralDecomposition {
  LaplacianVariant variant = LaplacianVariant::combinatorial;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::Index size() const { return eigenvalues.size(); }
  Eigen::MatrixXd reconstruct() const;
};

/// L = D - A, its normalization D^{-1/2} L D^{-1/2}, or L / lambda_max(L).
Eigen::MatrixXd laplacian(const Graph& graph, LaplacianVariant variant);

/// Symmetric eigendecomposition of a Laplacian.
///
/// Eigenvalues are clamped to be non-negative (and to at most 1 for the
/// scaled variant). Each eigenvector is signed so that its largest-magnitude
/// entry is positive.
SpectralDecomposition eigendecompose(const Eigen::MatrixXd& laplacian_matrix,
                                     LaplacianVariant variant);

inline SpectralDecomposition decompose(const Graph& graph, LaplacianVariant variant) {
  return eigendecompose(laplacian(graph, variant), variant);
}

/// U^T y.
Eigen::VectorXd graph_fourier_transform(const SpectralDecomposition& sd,
                                        const Eigen::Ref<const Eigen::VectorXd>& signal);

/// Symmetrized k-nearest-neighbour graph over coordinate rows. Edge weights
/// are exp(-d^2 / (2 sigma^2)) with sigma the mean k-NN distance. Distance
/// ties are broken by node index.
Graph knn_graph(const Eigen::MatrixXd& coords, int k);

/// Edge between i and j iff 0 < dist(i, j) < threshold, weighted 1 / dist.
Graph threshold_graph(const Eigen::MatrixXd& coords, double threshold);

enum class RandomGraphKind { sensor, barabasi_albert };

struct RandomGraphParams {
  RandomGraphKind kind = RandomGraphKind::sensor;
  int num_nodes = 30;
  // sensor: neighbours per node in the k-NN construction.
  int neighbours = 6;
  // barabasi_albert: size of the initial (edgeless) core and edges per new node.
  int initial_nodes = 10;
  int attach = 5;
};

/// Random connected graph. Disconnected draws are regenerated from a
/// seed-derived stream, at most 50 attempts.
Graph random_graph(const RandomGraphParams& params, std::uint64_t seed);

}  // namespace graphgp

#endif  // GRAPHGP_GRAPH_HPP
