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

#include <cmath>
#include <queue>

#include "doctest.h"
#include "graphgp/error.hpp"
#include "graphgp/graph.hpp"
#include "graphgp/random.hpp"
#include "helpers.hpp"

using namespace graphgp;
using graphgp::testing::max_abs;

namespace {

Graph two_node_path() {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  return Graph(a);
}

int count_components(const Eigen::MatrixXd& a) {
  const Eigen::Index m = a.rows();
  std::vector<int> label(m, -1);
  int components = 0;
  for (Eigen::Index s = 0; s < m; ++s) {
    if (label[s] >= 0) continue;
    std::queue<Eigen::Index> q;
    q.push(s);
    label[s] = components;
    while (!q.empty()) {
      const Eigen::Index u = q.front();
      q.pop();
      for (Eigen::Index v = 0; v < m; ++v) {
        if (a(u, v) > 0 && label[v] < 0) {
          label[v] = components;
          q.push(v);
        }
      }
    }
    ++components;
  }
  return components;
}

Graph sensor30(std::uint64_t seed) { return random_graph({RandomGraphKind::sensor, 30, 6}, seed); }

}  // namespace

TEST_SUITE("graph_core") {
  TEST_CASE("two-node Laplacians") {
    const Graph g = two_node_path();
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK(max_abs(laplacian(g, LaplacianVariant::combinatorial) - expected) == 0.0);
    CHECK(max_abs(laplacian(g, LaplacianVariant::scaled) - 0.5 * expected) < 1e-15);
    CHECK(max_abs(laplacian(g, LaplacianVariant::normalized) - expected) < 1e-15);
  }

  TEST_CASE("two-node eigendecomposition") {
    Eigen::MatrixXd l(2, 2);
    l << 1, -1, -1, 1;
    const auto sd = eigendecompose(l, LaplacianVariant::combinatorial);
    CHECK(sd.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sd.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(sd.eigenvectors(0, 0)) == doctest::Approx(r));
    CHECK(std::abs(sd.eigenvectors(1, 0)) == doctest::Approx(r));
    CHECK(sd.eigenvectors(0, 0) * sd.eigenvectors(1, 0) > 0);
    CHECK(sd.eigenvectors(0, 1) * sd.eigenvectors(1, 1) < 0);

    const auto scaled = eigendecompose(0.5 * l, LaplacianVariant::scaled);
    CHECK(scaled.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(scaled.eigenvalues(1) == doctest::Approx(1.0));
  }

  TEST_CASE("scaled spectrum of a sensor graph spans [0, 1]") {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      const auto sd = decompose(sensor30(seed), LaplacianVariant::scaled);
      CHECK(std::abs(sd.eigenvalues(0)) <= 1e-8);
      CHECK(std::abs(sd.eigenvalues(29) - 1.0) <= 1e-8);
      for (Eigen::Index i = 1; i < sd.size(); ++i) CHECK(sd.eigenvalues(i) >= sd.eigenvalues(i - 1));
    }
  }

  TEST_CASE("reconstruction and orthonormality on random graphs") {
    auto rng = make_stream(11);
    for (int trial = 0; trial < 5; ++trial) {
      const Graph g = graphgp::testing::random_connected_graph(10, rng);
      for (auto variant : {LaplacianVariant::combinatorial, LaplacianVariant::normalized,
                           LaplacianVariant::scaled}) {
        const Eigen::MatrixXd l = laplacian(g, variant);
        const auto sd = eigendecompose(l, variant);
        CHECK(max_abs(sd.reconstruct() - l) <= 1e-6);
        const Eigen::MatrixXd gram = sd.eigenvectors.transpose() * sd.eigenvectors;
        CHECK(max_abs(gram - Eigen::MatrixXd::Identity(10, 10)) <= 1e-8);
        CHECK(sd.eigenvalues.minCoeff() >= 0.0);
        for (Eigen::Index k = 0; k < sd.size(); ++k) {
          Eigen::Index arg = 0;
          sd.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
          CHECK(sd.eigenvectors(arg, k) > 0);
        }
        if (variant == LaplacianVariant::normalized) CHECK(sd.eigenvalues.maxCoeff() <= 2.0 + 1e-12);
      }
    }
  }

  TEST_CASE("Laplacian rows sum to zero and it is PSD") {
    auto rng = make_stream(12);
    const Graph g = graphgp::testing::random_connected_graph(12, rng);
    const Eigen::MatrixXd l = laplacian(g, LaplacianVariant::combinatorial);
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }

  TEST_CASE("invalid adjacency is rejected") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, 0.5, 0;
    CHECK_THROWS_AS(Graph{a}, ValidationError);
    a << 0, -1, -1, 0;
    CHECK_THROWS_AS(Graph{a}, ValidationError);
    a << 1, 1, 1, 0;
    CHECK_THROWS_AS(Graph{a}, ValidationError);
    a << 0, NAN, NAN, 0;
    CHECK_THROWS_AS(Graph{a}, ValidationError);
    CHECK_THROWS_AS(Graph{Eigen::MatrixXd::Zero(1, 1)}, ValidationError);
    CHECK_THROWS_AS(Graph{Eigen::MatrixXd::Zero(2, 3)}, ValidationError);
  }

  TEST_CASE("isolated node under the normalized variant") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    const Graph g(a);
    CHECK_THROWS_AS(laplacian(g, LaplacianVariant::normalized), DegreeZeroError);
    CHECK_NOTHROW(laplacian(g, LaplacianVariant::combinatorial));
    CHECK_FALSE(g.is_connected());
  }

  TEST_CASE("non-symmetric matrix passed to the eigensolver") {
    Eigen::MatrixXd l(2, 2);
    l << 1, -1, 0, 1;
    CHECK_THROWS_AS(eigendecompose(l, LaplacianVariant::combinatorial), ValidationError);
  }

  TEST_CASE("graph Fourier transform") {
    const auto sd = decompose(sensor30(3), LaplacianVariant::scaled);
    for (Eigen::Index k : {0, 7, 29}) {
      const Eigen::VectorXd coeffs = graph_fourier_transform(sd, sd.eigenvectors.col(k));
      CHECK(max_abs(coeffs - Eigen::VectorXd::Unit(30, k)) < 1e-10);
    }
    CHECK(graph_fourier_transform(sd, Eigen::VectorXd::Zero(30)).norm() == 0.0);
    auto rng = make_stream(5);
    const Eigen::VectorXd y = graphgp::testing::gaussian(30, 1, rng);
    CHECK(std::abs(graph_fourier_transform(sd, y).norm() - y.norm()) <= 1e-10);
    CHECK_THROWS_AS(graph_fourier_transform(sd, Eigen::VectorXd::Zero(29)), ValidationError);
  }

  TEST_CASE("k-NN on collinear points") {
    Eigen::MatrixXd x(3, 1);
    x << 0.0, 1.0, 3.0;
    const Graph g = knn_graph(x, 1);
    const auto& a = g.adjacency();
    CHECK(a(0, 1) > 0);
    CHECK(a(1, 2) > 0);
    CHECK(a(0, 2) == 0.0);
    CHECK(max_abs(a - a.transpose()) == 0.0);
  }

  TEST_CASE("k-NN on unit-square corners excludes diagonals") {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 1, 0, 1, 1, 0, 1;
    const Eigen::MatrixXd a = knn_graph(x, 2).adjacency();
    for (int i = 0; i < 4; ++i) {
      CHECK(a(i, (i + 1) % 4) > 0);
      CHECK(a(i, (i + 2) % 4) == 0.0);
    }
  }

  TEST_CASE("k-NN matches brute-force ranking and k = M - 1 is complete") {
    auto rng = make_stream(21);
    const Eigen::MatrixXd x = graphgp::testing::gaussian(9, 2, rng);
    const int k = 3;
    const Eigen::MatrixXd a = knn_graph(x, k).adjacency();
    Eigen::MatrixXi expected = Eigen::MatrixXi::Zero(9, 9);
    for (int i = 0; i < 9; ++i) {
      std::vector<std::pair<double, int>> d;
      for (int j = 0; j < 9; ++j)
        if (j != i) d.emplace_back((x.row(i) - x.row(j)).norm(), j);
      std::sort(d.begin(), d.end());
      for (int r = 0; r < k; ++r) expected(i, d[r].second) = expected(d[r].second, i) = 1;
    }
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) CHECK((a(i, j) > 0) == (expected(i, j) == 1));

    const Eigen::MatrixXd full = knn_graph(x, 8).adjacency();
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) CHECK((full(i, j) > 0) == (i != j));

    CHECK_THROWS_AS(knn_graph(x, 0), ValidationError);
    CHECK_THROWS_AS(knn_graph(x, 9), ValidationError);
  }

  TEST_CASE("threshold graph") {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 2.0;
    const Graph g = threshold_graph(x, 3.0);
    CHECK(g.adjacency()(0, 1) == doctest::Approx(0.5));
    x << 0.0, 4.0;
    CHECK(threshold_graph(x, 3.0).num_edges() == 0);
    x << 1.0, 1.0;
    CHECK_THROWS_AS(threshold_graph(x, 3.0), ValidationError);

    auto rng = make_stream(31);
    const Eigen::MatrixXd p = graphgp::testing::gaussian(5, 2, rng);
    const double t = 1.2;
    const Eigen::MatrixXd a = threshold_graph(p, t).adjacency();
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double d = (p.row(i) - p.row(j)).norm();
        const double w = (i != j && d < t) ? 1.0 / d : 0.0;
        CHECK(a(i, j) == doctest::Approx(w).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("Barabasi-Albert edge count and attachment") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Graph g = random_graph({RandomGraphKind::barabasi_albert, 30, 6, 10, 5}, seed);
      CHECK(g.num_edges() == 20 * 5);
      const Eigen::MatrixXd& a = g.adjacency();
      for (int v = 10; v < 30; ++v) CHECK((a.row(v).array() > 0).count() >= 5);
      // Each added node links to exactly five earlier nodes.
      for (int v = 10; v < 30; ++v) CHECK((a.row(v).head(v).array() > 0).count() == 5);
      CHECK(g.is_connected());
    }
  }

  TEST_CASE("sensor graphs are deterministic and connected") {
    const Graph a = sensor30(7);
    const Graph b = sensor30(7);
    CHECK(max_abs(a.adjacency() - b.adjacency()) == 0.0);
    CHECK(max_abs(a.adjacency() - sensor30(8).adjacency()) > 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Graph g = sensor30(seed);
      CHECK(count_components(g.adjacency()) == 1);
      CHECK(g.is_connected());
    }
  }

  TEST_CASE("variant names round-trip") {
    for (auto v : {LaplacianVariant::combinatorial, LaplacianVariant::normalized,
                   LaplacianVariant::scaled})
      CHECK(parse_laplacian_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_laplacian_variant("bogus"), ValidationError);
  }
}
