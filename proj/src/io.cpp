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

#include "graphgp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphgp/error.hpp"

namespace graphgp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long long> to_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows) {
    throw ValidationError("matrix shape does not match its data");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = data.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError("ragged matrix row");
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = row.at(static_cast<std::size_t>(j2)).get<double>();
  }
  return m;
}

json hyperparameters_to_json(const Hyperparameters& h) {
  json out;
  if (h.is_polynomial()) {
    const Eigen::VectorXd& b = h.polynomial().coefficients();
    out["output"] = {{"type", "polynomial"}, {"beta", std::vector<double>(b.data(), b.data() + b.size())}};
  } else {
    const BaselineGraphKernel& b = h.baseline();
    out["output"] = {{"type", "baseline"},
                     {"kind", std::string(to_string(b.kind))},
                     {"alpha", b.alpha},
                     {"p", b.p}};
  }
  json input = {{"variance", h.input.variance}};
  if (h.input.kind == InputKernelKind::squared_exponential) {
    input["kind"] = "squared-exponential";
    input["lengthscale"] = h.input.lengthscale;
  } else if (h.input.kind == InputKernelKind::independent) {
    input["kind"] = "independent";
  } else {
    input["kind"] = "precomputed";
    input["covariance"] = matrix_to_json(h.input.covariance);
  }
  out["input"] = std::move(input);
  out["noise_variance"] = h.noise_variance;
  return out;
}

Hyperparameters hyperparameters_from_json(const json& j) {
  Hyperparameters h;
  const json& out = j.at("output");
  const auto type = out.at("type").get<std::string>();
  if (type == "polynomial") {
    const auto beta = out.at("beta").get<std::vector<double>>();
    if (beta.empty()) throw ValidationError("polynomial kernel without coefficients");
    h.output = PolynomialGraphFilter(
        Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size())));
  } else if (type == "baseline") {
    BaselineGraphKernel b;
    b.kind = parse_baseline_kind(out.at("kind").get<std::string>());
    b.alpha = out.at("alpha").get<double>();
    b.p = out.at("p").get<int>();
    h.output = b;
  } else {
    throw ValidationError("unknown output kernel type '" + type + "'");
  }
  const json& in = j.at("input");
  const auto kind = in.at("kind").get<std::string>();
  if (kind == "squared-exponential") {
    h.input = InputKernelConfig::squared_exponential(in.at("lengthscale").get<double>(),
                                                     in.at("variance").get<double>());
  } else if (kind == "independent") {
    h.input = InputKernelConfig::independent(in.at("variance").get<double>());
  } else if (kind == "precomputed") {
    h.input = InputKernelConfig::precomputed(matrix_from_json(in.at("covariance")),
                                             in.at("variance").get<double>());
  } else {
    throw ValidationError("unknown input kernel '" + kind + "'");
  }
  h.noise_variance = j.at("noise_variance").get<double>();
  h.validate();
  return h;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

std::string matrix_to_csv(const Eigen::MatrixXd& m, std::string_view prefix) {
  std::string out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j > 0) out += ',';
    out += prefix;
    out += std::to_string(j);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m, std::string_view prefix) {
  write_atomic(path, matrix_to_csv(m, prefix));
}

Eigen::MatrixXd parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  bool first = true;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (std::string_view field : split(line, ',')) {
      auto v = to_double(field);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError("non-numeric CSV field on line " + std::to_string(line_no));
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError("CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("CSV contains no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  try {
    return parse_matrix_csv(read_text(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string edge_list_text(const Graph& graph) {
  const Eigen::MatrixXd& a = graph.adjacency();
  std::string out = "nodes " + std::to_string(graph.num_nodes()) + "\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) {
        out += std::to_string(i) + ' ' + std::to_string(j) + ' ' + format_double(a(i, j)) + '\n';
      }
    }
  }
  return out;
}

Graph parse_edge_list(std::string_view text) {
  std::optional<Eigen::Index> nodes;
  Eigen::MatrixXd a;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_ws(line);
    const std::string where = "edge list line " + std::to_string(line_no);
    if (!nodes) {
      auto m = fields.size() == 2 && fields[0] == "nodes" ? to_int(fields[1]) : std::nullopt;
      if (!m || *m < 2) throw ValidationError(where + ": expected 'nodes M' with M >= 2");
      nodes = static_cast<Eigen::Index>(*m);
      a = Eigen::MatrixXd::Zero(*nodes, *nodes);
      continue;
    }
    if (fields.size() != 3) throw ValidationError(where + ": expected 'u v w'");
    auto u = to_int(fields[0]);
    auto v = to_int(fields[1]);
    auto w = to_double(fields[2]);
    if (!u || !v || !w) throw ValidationError(where + ": malformed edge");
    if (*u < 0 || *v < 0 || *u >= *nodes || *v >= *nodes) {
      throw ValidationError(where + ": node id out of range");
    }
    if (*u == *v) throw ValidationError(where + ": self loop");
    if (!(*w >= 0.0) || !std::isfinite(*w)) throw ValidationError(where + ": invalid weight");
    a(*u, *v) = *w;
    a(*v, *u) = *w;
  }
  if (!nodes) throw ValidationError("edge list has no 'nodes M' line");
  return Graph(std::move(a));
}

Graph read_edge_list(const fs::path& path) {
  try {
    return parse_edge_list(read_text(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_edge_list(const fs::path& path, const Graph& graph) {
  write_atomic(path, edge_list_text(graph));
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string graph_fingerprint(const Graph& graph) { return fnv1a_hex(edge_list_text(graph)); }

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues read_key_values(const fs::path& path) { return parse_key_values(read_text(path)); }

std::string key_values_text(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string artifact_to_json(const ModelArtifact& artifact) {
  json j;
  j["format_version"] = ModelArtifact::kFormatVersion;
  j["vectorization"] = std::string(ModelArtifact::kVectorization);
  j["graph"] = {{"fingerprint", graph_fingerprint(artifact.graph)},
                {"edges", edge_list_text(artifact.graph)}};
  j["hyperparameters"] = hyperparameters_to_json(artifact.hyperparameters);
  j["training"] = {{"inputs", matrix_to_json(artifact.training.inputs)},
                   {"signals", matrix_to_json(artifact.training.signals)}};
  if (artifact.log_likelihood) j["log_likelihood"] = *artifact.log_likelihood;
  return j.dump(2) + "\n";
}

ModelArtifact artifact_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model artifact is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != ModelArtifact::kFormatVersion) {
      throw ValidationError("unsupported model format version " + std::to_string(version));
    }
    if (j.at("vectorization").get<std::string>() != ModelArtifact::kVectorization) {
      throw ValidationError("unsupported vectorization convention");
    }
    Graph graph = parse_edge_list(j.at("graph").at("edges").get<std::string>());
    if (graph_fingerprint(graph) != j.at("graph").at("fingerprint").get<std::string>()) {
      throw ValidationError("graph fingerprint does not match the stored edge list");
    }
    TrainingSet training{matrix_from_json(j.at("training").at("inputs")),
                         matrix_from_json(j.at("training").at("signals"))};
    training.validate(graph.num_nodes());
    ModelArtifact artifact{std::move(graph), hyperparameters_from_json(j.at("hyperparameters")),
                           std::move(training), std::nullopt};
    if (j.contains("log_likelihood")) artifact.log_likelihood = j.at("log_likelihood").get<double>();
    return artifact;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model artifact: ") + e.what());
  }
}

void save_artifact(const fs::path& path, const ModelArtifact& artifact) {
  write_atomic(path, artifact_to_json(artifact));
}

ModelArtifact load_artifact(const fs::path& path) {
  try {
    return artifact_from_json(read_text(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace graphgp
