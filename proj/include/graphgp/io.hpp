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

#ifndef GRAPHGP_IO_HPP
#define GRAPHGP_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "graphgp/gp_engine.hpp"
#include "graphgp/graph.hpp"

namespace graphgp {

/// "%.17g": the shortest fixed format that round-trips every double.
std::string format_double(double value);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// Numeric CSV with a header row `<prefix>0,...,<prefix>{cols-1}`.
std::string matrix_to_csv(const Eigen::MatrixXd& m, std::string_view prefix);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      std::string_view prefix = "node_");

/// Parses a numeric CSV. A first row that does not parse as numbers is taken
/// as a header. Every row must have the same number of fields.
Eigen::MatrixXd parse_matrix_csv(std::string_view text);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Edge-list format: `nodes M` on the first non-comment line, then `u v w`
/// per edge with 0-based ids; `#` starts a comment line.
std::string edge_list_text(const Graph& graph);
Graph parse_edge_list(std::string_view text);
Graph read_edge_list(const std::filesystem::path& path);
void write_edge_list(const std::filesystem::path& path, const Graph& graph);

/// FNV-1a 64 of the canonical edge list, as 16 hex digits.
std::string graph_fingerprint(const Graph& graph);
std::string fnv1a_hex(std::string_view bytes);

/// Flat `key = value` file; blank lines and `#` comments are skipped.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);
std::string key_values_text(const KeyValues& kv);

/// Saved model: hyperparameters plus the training set and graph needed to
/// form the posterior.
struct ModelArtifact {
  static constexpr int kFormatVersion = 1;
  static constexpr std::string_view kVectorization = "node-fastest";

  Graph graph;
  Hyperparameters hyperparameters;
  TrainingSet training;
  std::optional<double> log_likelihood;
};

std::string artifact_to_json(const ModelArtifact& artifact);
ModelArtifact artifact_from_json(std::string_view text);
void save_artifact(const std::filesystem::path& path, const ModelArtifact& artifact);
ModelArtifact load_artifact(const std::filesystem::path& path);

}  // namespace graphgp

#endif  // GRAPHGP_IO_HPP
