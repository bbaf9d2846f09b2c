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

#ifndef GRAPHGP_SYNTH_HPP
#define GRAPHGP_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "graphgp/graph.hpp"
#include "graphgp/kernels.hpp"

namespace graphgp {

/// Ground-truth filter theta(L_S) used to colour white signals.
struct GroundTruthFilter {
  PolynomialGraphFilter polynomial;
  std::string name;

  GroundTruthFilter(PolynomialGraphFilter p, std::string n);

  /// First five Taylor terms of exp(-1.5 lambda).
  static GroundTruthFilter lowpass_taylor();
  /// 0 + lambda + 4 lambda^2 + lambda^3 - 6 lambda^4.
  static GroundTruthFilter bandpass();
  static GroundTruthFilter identity();

  /// "lowpass-taylor", "bandpass", "identity" or "custom:c0,c1,...".
  static GroundTruthFilter parse(std::string_view spec);
  std::string spec() const;
};

struct SyntheticDataset {
  Graph graph;
  Eigen::MatrixXd inputs;   // index column into the input covariance
  Eigen::MatrixXd signals;  // N x M
  GroundTruthFilter truth;
  std::optional<double> snr_db;
  double noise_variance = 0.0;
  std::uint64_t seed = 0;
  // Input-space covariance; identity when the signals are independent.
  Eigen::MatrixXd input_covariance;
};

/// y_i = theta(L_S) y'_i + noise with y'_i ~ N(0, I).
SyntheticDataset generate_filtered_signals(const Graph& graph, const GroundTruthFilter& theta,
                                           Eigen::Index num_signals, std::optional<double> snr_db,
                                           std::uint64_t seed);

struct NoisySignals {
  Eigen::MatrixXd signals;
  double noise_variance = 0.0;
};

/// Adds i.i.d. Gaussian noise with variance mean(signals^2) / 10^(snr_db / 10).
NoisySignals add_noise_snr(const Eigen::MatrixXd& signals, double snr_db, std::uint64_t seed);

/// C ~ inverse-Wishart(I, n + 2) of size n.
Eigen::MatrixXd sample_inverse_wishart(Eigen::Index n, std::uint64_t seed);

/// Delta F for an N x M matrix Delta whose columns are independent N(0, C)
/// draws; F is the M x M filter matrix.
Eigen::MatrixXd sample_coupled_signals(const Eigen::MatrixXd& filter, const Eigen::MatrixXd& c,
                                       std::uint64_t seed);

/// Rows y_i = theta(L_S) r_i where the columns of the N x M matrix with rows
/// r_i are independent N(0, C) draws.
SyntheticDataset generate_wishart_dataset(const Graph& graph, const GroundTruthFilter& theta,
                                          Eigen::Index num_signals, std::uint64_t seed,
                                          std::optional<double> snr_db = std::nullopt);

}  // namespace graphgp

#endif  // GRAPHGP_SYNTH_HPP
