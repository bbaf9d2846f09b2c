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

#include "graphgp/synth.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "graphgp/error.hpp"
#include "graphgp/random.hpp"

namespace graphgp {

namespace {

enum Stream : std::uint64_t { kSignals = 1, kNoise = 2, kCovariance = 3, kCoupled = 4 };

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  }
  return out;
}

Eigen::MatrixXd filter_of(const Graph& graph, const GroundTruthFilter& theta) {
  if (!graph.is_connected()) throw ValidationError("synthetic signals need a connected graph");
  return filter_matrix(theta.polynomial, decompose(graph, LaplacianVariant::scaled));
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("invalid number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

GroundTruthFilter::GroundTruthFilter(PolynomialGraphFilter p, std::string n)
    : polynomial(std::move(p)), name(std::move(n)) {
  if (polynomial.coefficients().cwiseAbs().maxCoeff() == 0.0) {
    throw ValidationError("ground-truth filter has no nonzero coefficient");
  }
}

GroundTruthFilter GroundTruthFilter::lowpass_taylor() {
  return {PolynomialGraphFilter{1.0, -1.5, 1.125, -0.5625, 0.2109375}, "lowpass-taylor"};
}

GroundTruthFilter GroundTruthFilter::bandpass() {
  return {PolynomialGraphFilter{0.0, 1.0, 4.0, 1.0, -6.0}, "bandpass"};
}

GroundTruthFilter GroundTruthFilter::identity() {
  return {PolynomialGraphFilter{1.0}, "identity"};
}

GroundTruthFilter GroundTruthFilter::parse(std::string_view spec) {
  if (spec == "lowpass-taylor" || spec == "lowpass") return lowpass_taylor();
  if (spec == "bandpass") return bandpass();
  if (spec == "identity") return identity();
  constexpr std::string_view prefix = "custom:";
  if (spec.substr(0, prefix.size()) != prefix) {
    throw ValidationError("unknown filter '" + std::string(spec) + "'");
  }
  std::string_view rest = spec.substr(prefix.size());
  std::vector<double> coefs;
  while (true) {
    const auto comma = rest.find(',');
    coefs.push_back(parse_double(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return {PolynomialGraphFilter(Eigen::Map<Eigen::VectorXd>(coefs.data(),
                                                            static_cast<Eigen::Index>(coefs.size()))),
          "custom"};
}

std::string GroundTruthFilter::spec() const {
  if (name != "custom") return name;
  std::string out = "custom:";
  char buf[32];
  const Eigen::VectorXd& c = polynomial.coefficients();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", c(i));
    if (i > 0) out += ',';
    out += buf;
  }
  return out;
}

NoisySignals add_noise_snr(const Eigen::MatrixXd& signals, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) throw ValidationError("SNR must be finite");
  const double power = signals.size() == 0 ? 0.0 : signals.array().square().mean();
  if (!(power > 0.0)) throw ValidationError("cannot set SNR on zero-power signals");
  const double variance = power / std::pow(10.0, snr_db / 10.0);
  auto rng = make_stream(seed, kNoise);
  NoisySignals out;
  out.noise_variance = variance;
  out.signals = signals + std::sqrt(variance) * gaussian_matrix(signals.rows(), signals.cols(), rng);
  return out;
}

SyntheticDataset generate_filtered_signals(const Graph& graph, const GroundTruthFilter& theta,
                                           Eigen::Index num_signals, std::optional<double> snr_db,
                                           std::uint64_t seed) {
  if (num_signals < 1) throw ValidationError("at least one signal is required");
  const Eigen::MatrixXd f = filter_of(graph, theta);
  auto rng = make_stream(seed, kSignals);
  const Eigen::MatrixXd white = gaussian_matrix(num_signals, graph.num_nodes(), rng);
  SyntheticDataset ds{graph, index_inputs(num_signals), white * f, theta, snr_db, 0.0, seed,
                      Eigen::MatrixXd::Identity(num_signals, num_signals)};
  if (snr_db) {
    NoisySignals noisy = add_noise_snr(ds.signals, *snr_db, seed);
    ds.signals = std::move(noisy.signals);
    ds.noise_variance = noisy.noise_variance;
  }
  return ds;
}

Eigen::MatrixXd sample_inverse_wishart(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("covariance size must be positive");
  const Eigen::Index df = n + 2;
  for (std::uint64_t attempt = 0; attempt < 50; ++attempt) {
    auto rng = make_stream(seed, (kCovariance << 32) + attempt);
    const Eigen::MatrixXd z = gaussian_matrix(df, n, rng);
    const Eigen::MatrixXd w = z.transpose() * z;
    Eigen::LLT<Eigen::MatrixXd> llt(w);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd c = llt.solve(Eigen::MatrixXd::Identity(n, n));
    c = (0.5 * (c + c.transpose())).eval();
    if (Eigen::LLT<Eigen::MatrixXd>(c).info() == Eigen::Success && c.allFinite()) return c;
  }
  throw NumericalError("could not sample a positive definite covariance");
}

Eigen::MatrixXd sample_coupled_signals(const Eigen::MatrixXd& filter, const Eigen::MatrixXd& c,
                                       std::uint64_t seed) {
  if (filter.rows() != filter.cols() || c.rows() != c.cols()) {
    throw ValidationError("filter and covariance must be square");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw NumericalError("input covariance is not positive definite");
  auto rng = make_stream(seed, kCoupled);
  const Eigen::MatrixXd delta = llt.matrixL() * gaussian_matrix(c.rows(), filter.rows(), rng);
  return delta * filter;
}

SyntheticDataset generate_wishart_dataset(const Graph& graph, const GroundTruthFilter& theta,
                                          Eigen::Index num_signals, std::uint64_t seed,
                                          std::optional<double> snr_db) {
  if (num_signals < 2) throw ValidationError("the coupled dataset needs at least two signals");
  const Eigen::MatrixXd f = filter_of(graph, theta);
  Eigen::MatrixXd c = sample_inverse_wishart(num_signals, seed);
  Eigen::MatrixXd signals = sample_coupled_signals(f, c, seed);
  SyntheticDataset ds{graph, index_inputs(num_signals), std::move(signals), theta, snr_db, 0.0,
                      seed, std::move(c)};
  if (snr_db) {
    NoisySignals noisy = add_noise_snr(ds.signals, *snr_db, seed);
    ds.signals = std::move(noisy.signals);
    ds.noise_variance = noisy.noise_variance;
  }
  return ds;
}

}  // namespace graphgp
