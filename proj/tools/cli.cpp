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

#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphgp/error.hpp"
#include "graphgp/evaluation.hpp"
#include "graphgp/gp_engine.hpp"
#include "graphgp/io.hpp"
#include "graphgp/spectral_learner.hpp"
#include "graphgp/synth.hpp"
#include "graphgp/version.hpp"

namespace graphgp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("invalid " + what + " '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(':', start);
    parts.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

// PATH:value where PATH may itself contain ':'.
std::pair<std::string, std::string> split_last(const std::string& rest, const std::string& spec) {
  const auto pos = rest.rfind(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == rest.size()) {
    throw ValidationError("graph source '" + spec + "' needs PATH:value");
  }
  return {rest.substr(0, pos), rest.substr(pos + 1)};
}

json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

struct Manifest {
  std::vector<std::string> arguments;
  std::string subcommand;
  json options = json::object();
  std::uint64_t seed = 0;
};

void write_manifest(const fs::path& dir, const Manifest& m) {
  std::string flat;
  for (const auto& [k, v] : m.options.items()) flat += k + "=" + v.dump() + "\n";
  json j;
  j["tool"] = "graphgp";
  j["subcommand"] = m.subcommand;
  j["arguments"] = m.arguments;
  j["options"] = m.options;
  j["config_hash"] = fnv1a_hex(flat);
  j["seed"] = m.seed;
  j["versions"] = {{"graphgp", std::string(kVersion)},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"cli11", CLI11_VERSION},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  write_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

fs::path prepare_output(const std::string& out) {
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + out + "'");
  return dir;
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw IoError(what + " '" + path + "' does not exist");
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
  std::string out = "lambda,value,scaled,eigenvalue\n";
  for (const SpectrumRow& r : rows) {
    out += format_double(r.lambda) + ',' + format_double(r.value) + ',' + format_double(r.scaled) +
           ',' + (r.eigenvalue ? "1" : "0") + '\n';
  }
  return out;
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::string out = "iteration,lagrangian,negative_log_likelihood,max_violation\n";
  for (const TraceEntry& t : trace) {
    out += std::to_string(t.iteration) + ',' + format_double(t.lagrangian) + ',' +
           format_double(t.negative_log_likelihood) + ',' + format_double(t.max_violation) + '\n';
  }
  return out;
}

std::string grid_csv(const InitializationRecord& rec) {
  std::string out;
  const Eigen::Index width = rec.candidates.empty() ? 0 : rec.candidates.front().beta.size();
  for (Eigen::Index i = 0; i < width; ++i) out += "beta_" + std::to_string(i) + ',';
  out += "noise_variance,log_likelihood\n";
  for (const GridCandidate& c : rec.candidates) {
    for (Eigen::Index i = 0; i < c.beta.size(); ++i) out += format_double(c.beta(i)) + ',';
    out += format_double(c.noise_variance) + ',' + format_double(c.log_likelihood) + '\n';
  }
  return out;
}

json hyper_json(const Hyperparameters& h) {
  json j;
  if (h.is_polynomial()) {
    j["kernel"] = "polynomial";
    j["beta"] = vector_json(h.polynomial().coefficients());
  } else {
    j["kernel"] = std::string(to_string(h.baseline().kind));
    if (uses_alpha(h.baseline().kind)) j["alpha"] = h.baseline().alpha;
    if (h.baseline().kind == BaselineKind::p_step_random_walk) j["p"] = h.baseline().p;
  }
  switch (h.input.kind) {
    case InputKernelKind::squared_exponential: j["input_kernel"] = "squared-exponential"; break;
    case InputKernelKind::precomputed: j["input_kernel"] = "precomputed"; break;
    case InputKernelKind::independent: j["input_kernel"] = "independent"; break;
  }
  if (h.input.has_lengthscale()) j["lengthscale"] = h.input.lengthscale;
  j["input_variance"] = h.input.variance;
  j["noise_variance"] = h.noise_variance;
  return j;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::string graph;
  std::string filter = "lowpass-taylor";
  Eigen::Index n = 50;
  Eigen::Index test = 0;
  std::string snr = "10";
  std::string mode = "independent";
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_synth(const SynthOptions& o, Manifest& manifest, std::ostream& log) {
  const GroundTruthFilter theta = GroundTruthFilter::parse(o.filter);
  std::optional<double> snr;
  if (o.snr != "none" && o.snr != "inf") snr = parse_number<double>(o.snr, "SNR");
  if (o.test < 0 || o.test >= o.n) throw ValidationError("--test must lie in [0, n)");
  const Graph graph = load_graph(o.graph, o.seed);
  SyntheticDataset ds = [&] {
    if (o.mode == "independent") return generate_filtered_signals(graph, theta, o.n, snr, o.seed);
    if (o.mode == "wishart") return generate_wishart_dataset(graph, theta, o.n, o.seed, snr);
    throw ValidationError("unknown mode '" + o.mode + "' (independent or wishart)");
  }();
  const fs::path dir = prepare_output(o.out);
  const Eigen::Index train = o.n - o.test;
  write_matrix_csv(dir / "signals.csv", ds.signals.topRows(train), "node_");
  write_matrix_csv(dir / "inputs.csv", ds.inputs.topRows(train), "x_");
  if (o.test > 0) {
    write_matrix_csv(dir / "test_signals.csv", ds.signals.bottomRows(o.test), "node_");
    write_matrix_csv(dir / "test_inputs.csv", ds.inputs.bottomRows(o.test), "x_");
  }
  if (o.mode == "wishart") write_matrix_csv(dir / "covariance.csv", ds.input_covariance, "c_");
  write_edge_list(dir / "graph.edges", graph);
  KeyValues prov;
  prov["graph"] = o.graph;
  prov["graph_fingerprint"] = graph_fingerprint(graph);
  prov["filter"] = theta.spec();
  prov["mode"] = o.mode;
  prov["signals"] = std::to_string(o.n);
  prov["test_signals"] = std::to_string(o.test);
  prov["seed"] = std::to_string(o.seed);
  prov["snr_db"] = snr ? format_double(*snr) : "none";
  prov["noise_variance"] = format_double(ds.noise_variance);
  write_atomic(dir / "provenance.txt", key_values_text(prov));
  manifest.seed = o.seed;
  log << "wrote " << train << " training";
  if (o.test > 0) log << " and " << o.test << " test";
  log << " signals on " << graph.num_nodes() << " nodes to " << dir.string() << "\n";
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string graph;
  std::string signals;
  std::string inputs;
  std::string covariance;
  std::string input_kernel;
  std::string kernel = "polynomial";
  int degree = 2;
  int p = 1;
  std::string hint = "lowpass";
  bool unconstrained = false;
  OptimizerConfig optimizer;
  std::string out;
};

TrainingSet load_training(const std::string& signals_path, const std::string& inputs_path,
                          const InputKernelConfig& kernel) {
  require_file(signals_path, "signals file");
  TrainingSet data;
  data.signals = read_matrix_csv(signals_path);
  if (!inputs_path.empty()) {
    require_file(inputs_path, "inputs file");
    data.inputs = read_matrix_csv(inputs_path);
  } else if (!kernel.has_lengthscale()) {
    data.inputs = index_inputs(data.signals.rows());
  } else {
    throw ValidationError("the squared-exponential input kernel needs --inputs");
  }
  return data;
}

InputKernelConfig input_template(const FitOptions& o) {
  std::string kind = o.input_kernel;
  if (kind.empty()) {
    kind = !o.covariance.empty() ? "precomputed"
                                 : (!o.inputs.empty() ? "squared-exponential" : "independent");
  }
  if (kind == "independent") {
    if (!o.covariance.empty()) throw ValidationError("--covariance conflicts with independent inputs");
    return InputKernelConfig::independent();
  }
  if (kind == "precomputed") {
    if (o.covariance.empty()) throw ValidationError("the precomputed input kernel needs --covariance");
    require_file(o.covariance, "covariance file");
    return InputKernelConfig::precomputed(read_matrix_csv(o.covariance));
  }
  if (kind == "squared-exponential" || kind == "se") {
    return InputKernelConfig::squared_exponential(1.0, 1.0);
  }
  throw ValidationError("unknown input kernel '" + kind + "'");
}

int cmd_fit(const FitOptions& o, Manifest& manifest, std::ostream& log, std::ostream& err) {
  const Graph graph = load_graph(o.graph, o.optimizer.seed);
  InputKernelConfig tmpl = input_template(o);
  TrainingSet data = load_training(o.signals, o.inputs, tmpl);
  if (data.num_nodes() != graph.num_nodes()) {
    throw ValidationError("signals have " + std::to_string(data.num_nodes()) +
                          " columns but the graph has " + std::to_string(graph.num_nodes()) +
                          " nodes");
  }
  GraphContext ctx(graph);
  const fs::path dir = prepare_output(o.out);
  manifest.seed = o.optimizer.seed;

  json report;
  Hyperparameters fitted;
  double ll = 0.0;
  if (o.kernel == "polynomial") {
    FitReport rep;
    try {
      rep = fit_polynomial(data, ctx, o.degree, parse_spectrum_hint(o.hint), tmpl, o.optimizer,
                           !o.unconstrained);
    } catch (const FitDivergedError& e) {
      write_atomic(dir / "trace.csv", trace_csv(e.trace()));
      err << "fit diverged; partial trace written to " << (dir / "trace.csv").string() << "\n";
      throw;
    }
    fitted = rep.hyperparameters;
    ll = rep.log_likelihood;
    report["constrained"] = rep.constrained;
    report["feasible"] = rep.feasible;
    report["converged"] = rep.converged;
    report["iterations"] = rep.iterations;
    report["feasibility_shift"] = rep.feasibility_shift;
    report["min_spectrum"] = rep.min_spectrum;
    report["possible_negative_spectrum"] = !rep.constrained && !rep.feasible;
    report["lagrange_multipliers"] = vector_json(rep.lagrange.multipliers());
    if (rep.initialization) {
      const InitializationRecord& init = *rep.initialization;
      json ij;
      ij["signal_variance"] = init.signal_variance;
      if (init.lengthscale) ij["lengthscale"] = *init.lengthscale;
      ij["grid_size"] = init.grid_size;
      ij["sampled"] = init.sampled;
      ij["best"] = {{"beta", vector_json(init.best.beta)},
                    {"noise_variance", init.best.noise_variance},
                    {"log_likelihood", init.best.log_likelihood}};
      ij["refined_log_likelihood"] = init.refined_log_likelihood;
      report["initialization"] = ij;
      write_atomic(dir / "grid.csv", grid_csv(init));
    }
    write_atomic(dir / "trace.csv", trace_csv(rep.trace));
    if (!rep.constrained && !rep.feasible) {
      log << "warning: unconstrained fit; the learned spectrum is negative at some eigenvalue\n";
    }
  } else {
    BaselineGraphKernel b;
    b.kind = parse_baseline_kind(o.kernel);
    b.p = o.p;
    UnconstrainedResult rep = fit_baseline(data, ctx, b, tmpl, o.optimizer);
    fitted = rep.hyperparameters;
    ll = rep.trace.back();
    report["converged"] = rep.converged;
    report["iterations"] = rep.iterations;
    std::string trace = "iteration,log_likelihood\n";
    for (std::size_t i = 0; i < rep.trace.size(); ++i) {
      trace += std::to_string(i) + ',' + format_double(rep.trace[i]) + '\n';
    }
    write_atomic(dir / "trace.csv", trace);
  }
  report["hyperparameters"] = hyper_json(fitted);
  report["log_likelihood"] = ll;
  report["graph_fingerprint"] = graph_fingerprint(graph);

  save_artifact(dir / "model.json", ModelArtifact{graph, fitted, data, ll});
  write_atomic(dir / "fit_report.json", report.dump(2) + "\n");
  log << "log-marginal likelihood " << format_double(ll) << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- predict / eval

Posterior artifact_posterior(const ModelArtifact& model, const Eigen::MatrixXd& test_inputs) {
  GraphContext ctx(model.graph);
  return posterior_predict(model.hyperparameters, model.training, ctx, test_inputs);
}

struct PredictOptions {
  std::string model;
  std::string inputs;
  std::string out;
};

void cmd_predict(const PredictOptions& o, std::ostream& log) {
  require_file(o.model, "model file");
  require_file(o.inputs, "inputs file");
  const ModelArtifact model = load_artifact(o.model);
  const Posterior post = artifact_posterior(model, read_matrix_csv(o.inputs));
  Eigen::MatrixXd variance(post.size(), post.mean.cols());
  for (Eigen::Index t = 0; t < post.size(); ++t) {
    variance.row(t) = post.covariance[static_cast<std::size_t>(t)].diagonal().transpose();
  }
  const fs::path dir = prepare_output(o.out);
  write_matrix_csv(dir / "mean.csv", post.mean, "node_");
  write_matrix_csv(dir / "variance.csv", variance, "node_");
  log << "predicted " << post.size() << " signals\n";
}

struct EvalOptions {
  std::string model;
  std::string signals;
  std::string inputs;
  int folds = 10;
  Eigen::Index fold_size = 0;
  std::string out;
};

void cmd_eval(const EvalOptions& o, std::ostream& log) {
  require_file(o.model, "model file");
  require_file(o.signals, "test signals file");
  const ModelArtifact model = load_artifact(o.model);
  const Eigen::MatrixXd signals = read_matrix_csv(o.signals);
  Eigen::MatrixXd inputs;
  if (!o.inputs.empty()) {
    require_file(o.inputs, "test inputs file");
    inputs = read_matrix_csv(o.inputs);
  } else {
    throw ValidationError("eval needs --inputs with the test inputs or indices");
  }
  if (inputs.rows() != signals.rows()) {
    throw ValidationError("test inputs and test signals have different row counts");
  }
  const auto ranges = o.fold_size > 0 ? folds_by_size(signals.rows(), o.fold_size)
                                      : folds_by_count(signals.rows(), o.folds);
  const Posterior post = artifact_posterior(model, inputs);
  const FoldMetrics m = summarize_folds(per_signal_log_likelihood(post, signals), ranges);

  std::string csv = "fold,size,log_likelihood\n";
  json folds = json::array();
  for (const FoldResult& f : m.folds) {
    csv += std::to_string(f.fold) + ',' + std::to_string(f.size) + ',' +
           format_double(f.log_likelihood) + '\n';
    folds.push_back({{"fold", f.fold}, {"size", f.size}, {"log_likelihood", f.log_likelihood}});
  }
  json metrics = {{"folds", folds}, {"mean", m.mean}, {"standard_error", m.standard_error}};
  if (m.warning) metrics["warning"] = *m.warning;
  const fs::path dir = prepare_output(o.out);
  write_atomic(dir / "folds.csv", csv);
  write_atomic(dir / "metrics.json", metrics.dump(2) + "\n");
  log << "mean test log-likelihood " << format_double(m.mean) << " (standard error "
      << format_double(m.standard_error) << ")\n";
  if (m.warning) log << "warning: " << *m.warning << "\n";
}

// ---------------------------------------------------------------- spectrum / graph

struct SpectrumOptions {
  std::string model;
  double grid_step = 0.01;
  std::string out;
};

void cmd_spectrum(const SpectrumOptions& o, std::ostream& log) {
  require_file(o.model, "model file");
  const ModelArtifact model = load_artifact(o.model);
  GraphContext ctx(model.graph);
  const auto rows = spectrum_export(model.hyperparameters.output, ctx, o.grid_step);
  const fs::path dir = prepare_output(o.out);
  write_atomic(dir / "spectrum.csv", spectrum_csv(rows));
  log << "wrote " << rows.size() << " spectrum rows\n";
}

struct GraphOptions {
  std::string graph;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_graph(const GraphOptions& o, Manifest& manifest, std::ostream& log) {
  const Graph graph = load_graph(o.graph, o.seed);
  const SpectralDecomposition comb = decompose(graph, LaplacianVariant::combinatorial);
  const SpectralDecomposition scaled = decompose(graph, LaplacianVariant::scaled);
  std::optional<SpectralDecomposition> norm;
  if ((graph.degrees().array() > 0.0).all()) norm = decompose(graph, LaplacianVariant::normalized);

  std::string csv = norm ? "combinatorial,normalized,scaled\n" : "combinatorial,scaled\n";
  for (Eigen::Index i = 0; i < graph.num_nodes(); ++i) {
    csv += format_double(comb.eigenvalues(i)) + ',';
    if (norm) csv += format_double(norm->eigenvalues(i)) + ',';
    csv += format_double(scaled.eigenvalues(i)) + '\n';
  }
  json summary = {{"nodes", graph.num_nodes()},
                  {"edges", graph.num_edges()},
                  {"connected", graph.is_connected()},
                  {"fingerprint", graph_fingerprint(graph)},
                  {"lambda_max", comb.eigenvalues.maxCoeff()}};
  const fs::path dir = prepare_output(o.out);
  write_edge_list(dir / "graph.edges", graph);
  write_atomic(dir / "eigenvalues.csv", csv);
  write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  manifest.seed = o.seed;
  log << graph.num_nodes() << " nodes, " << graph.num_edges() << " edges, "
      << (graph.is_connected() ? "connected" : "disconnected") << "\n";
}

// Inserts `--key=value` for each config entry right after the subcommand so
// that flags given on the command line, which come later, take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::size_t sub = 0;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (sub == 0 && !args[i].empty() && args[i][0] != '-') sub = i;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  if (sub == 0) throw ValidationError("--config must follow a subcommand");
  require_file(path, "config file");
  const KeyValues kv = read_key_values(path);
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub) + 1);
  for (const auto& [k, v] : kv) {
    if (k == "config") throw ValidationError("config files cannot include other config files");
    out.push_back("--" + k + "=" + v);
  }
  out.insert(out.end(), args.begin() + static_cast<long>(sub) + 1, args.end());
  return out;
}

json collect_options(const CLI::App* sub) {
  json out = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help" || opt->get_name() == "--config") continue;
    const std::string name = opt->get_name().substr(opt->get_name().find_first_not_of('-'));
    const auto& results = opt->results();
    out[name] = results.empty() ? std::string("true") : results.back();
  }
  return out;
}

}  // namespace

Graph load_graph(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "sensor" || head == "ba") {
    RandomGraphParams p;
    p.kind = head == "sensor" ? RandomGraphKind::sensor : RandomGraphKind::barabasi_albert;
    const auto parts = rest.empty() ? std::vector<std::string>{} : split_colon(rest);
    if (parts.size() > (head == "sensor" ? 2u : 3u)) {
      throw ValidationError("too many parameters in graph source '" + spec + "'");
    }
    if (!parts.empty()) p.num_nodes = parse_number<int>(parts[0], "node count");
    if (head == "sensor" && parts.size() > 1) p.neighbours = parse_number<int>(parts[1], "k");
    if (head == "ba" && parts.size() > 1) p.initial_nodes = parse_number<int>(parts[1], "m0");
    if (head == "ba" && parts.size() > 2) p.attach = parse_number<int>(parts[2], "attach count");
    return random_graph(p, seed);
  }
  if (head == "knn" || head == "threshold") {
    const auto [path, value] = split_last(rest, spec);
    require_file(path, "coordinates file");
    const Eigen::MatrixXd coords = read_matrix_csv(path);
    if (head == "knn") return knn_graph(coords, parse_number<int>(value, "k"));
    return threshold_graph(coords, parse_number<double>(value, "threshold"));
  }
  const std::string path = head == "edges" ? rest : spec;
  require_file(path, "edge-list file");
  return read_edge_list(path);
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian process regression on graph signals with learned spectral kernels",
               "graphgp"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto add_config = [](CLI::App* sub) {
    sub->add_option("--config", "Flat key = value file; every key is a long option name")
        ->check(CLI::ExistingFile);
  };

  SynthOptions so;
  CLI::App* synth = app.add_subcommand("synth", "Generate filtered graph signals");
  synth->add_option("--graph", so.graph, "Graph source")->required();
  synth->add_option("--filter", so.filter, "lowpass-taylor, bandpass, identity or custom:c0,c1,...")
      ->capture_default_str();
  synth->add_option("--n", so.n, "Number of signals")->capture_default_str();
  synth->add_option("--test", so.test, "Signals held out as a test set")->capture_default_str();
  synth->add_option("--snr", so.snr, "SNR in dB, or none")->capture_default_str();
  synth->add_option("--mode", so.mode, "independent or wishart")->capture_default_str();
  synth->add_option("--seed", so.seed)->capture_default_str();
  synth->add_option("--out", so.out, "Output directory")->required();
  add_config(synth);

  FitOptions fo;
  CLI::App* fit = app.add_subcommand("fit", "Learn a graph GP model");
  fit->add_option("--graph", fo.graph, "Graph source")->required();
  fit->add_option("--signals", fo.signals, "Training signals CSV")->required();
  fit->add_option("--inputs", fo.inputs, "Training inputs CSV");
  fit->add_option("--covariance", fo.covariance, "Input covariance CSV for index inputs");
  fit->add_option("--input-kernel", fo.input_kernel,
                  "independent, precomputed or squared-exponential");
  fit->add_option("--kernel", fo.kernel, "polynomial or a baseline kernel name")
      ->capture_default_str();
  fit->add_option("--degree", fo.degree, "Polynomial degree")->capture_default_str();
  fit->add_option("--p", fo.p, "Steps of the p-step random walk kernel")->capture_default_str();
  fit->add_option("--hint", fo.hint, "Grid for initialization: lowpass or general")
      ->capture_default_str();
  fit->add_flag("--unconstrained", fo.unconstrained, "Skip the positivity constraint");
  OptimizerConfig& oc = fo.optimizer;
  fit->add_option("--beta-rate", oc.beta_rate)->capture_default_str();
  fit->add_option("--multiplier-rate", oc.multiplier_rate)->capture_default_str();
  fit->add_option("--lengthscale-rate", oc.lengthscale_rate)->capture_default_str();
  fit->add_option("--noise-rate", oc.noise_rate)->capture_default_str();
  fit->add_option("--alpha-rate", oc.alpha_rate)->capture_default_str();
  fit->add_option("--variance-rate", oc.variance_rate)->capture_default_str();
  fit->add_option("--max-outer-iterations", oc.max_outer_iterations)->capture_default_str();
  fit->add_option("--inner-steps", oc.inner_steps)->capture_default_str();
  fit->add_option("--max-halvings", oc.max_halvings)->capture_default_str();
  fit->add_option("--tolerance", oc.tolerance)->capture_default_str();
  fit->add_option("--patience", oc.patience)->capture_default_str();
  fit->add_option("--unconstrained-iterations", oc.unconstrained_iterations)->capture_default_str();
  fit->add_option("--max-grid-candidates", oc.max_grid_candidates)->capture_default_str();
  fit->add_option("--precondition", oc.precondition)->capture_default_str();
  fit->add_option("--seed", oc.seed)->capture_default_str();
  fit->add_option("--out", fo.out, "Output directory")->required();
  add_config(fit);

  PredictOptions po;
  CLI::App* predict = app.add_subcommand("predict", "Posterior mean and variance at new inputs");
  predict->add_option("--model", po.model)->required();
  predict->add_option("--inputs", po.inputs, "Test inputs CSV")->required();
  predict->add_option("--out", po.out)->required();
  add_config(predict);

  EvalOptions eo;
  CLI::App* eval = app.add_subcommand("eval", "Per-fold test log-likelihood");
  eval->add_option("--model", eo.model)->required();
  eval->add_option("--signals", eo.signals, "Test signals CSV")->required();
  eval->add_option("--inputs", eo.inputs, "Test inputs CSV");
  auto* folds_opt = eval->add_option("--folds", eo.folds)->capture_default_str();
  eval->add_option("--fold-size", eo.fold_size, "Signals per fold")->excludes(folds_opt);
  eval->add_option("--out", eo.out)->required();
  add_config(eval);

  SpectrumOptions spo;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Export the learned spectral response");
  spectrum->add_option("--model", spo.model)->required();
  spectrum->add_option("--grid-step", spo.grid_step)->capture_default_str();
  spectrum->add_option("--out", spo.out)->required();
  add_config(spectrum);

  GraphOptions go;
  CLI::App* graph = app.add_subcommand("graph", "Build a graph and inspect its spectrum");
  graph->add_option("--graph", go.graph, "Graph source")->required();
  graph->add_option("--seed", go.seed)->capture_default_str();
  graph->add_option("--out", go.out)->required();
  add_config(graph);

  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kSuccess : kValidation;
    }

    Manifest manifest;
    manifest.arguments.assign(args.begin() + 1, args.end());
    CLI::App* sub = app.get_subcommands().front();
    manifest.subcommand = sub->get_name();
    manifest.options = collect_options(sub);
    std::string out_dir;
    int code = kSuccess;
    if (sub == synth) {
      cmd_synth(so, manifest, out);
      out_dir = so.out;
    } else if (sub == fit) {
      fo.optimizer.validate();
      code = cmd_fit(fo, manifest, out, err);
      out_dir = fo.out;
    } else if (sub == predict) {
      cmd_predict(po, out);
      out_dir = po.out;
    } else if (sub == eval) {
      cmd_eval(eo, out);
      out_dir = eo.out;
    } else if (sub == spectrum) {
      cmd_spectrum(spo, out);
      out_dir = spo.out;
    } else {
      cmd_graph(go, manifest, out);
      out_dir = go.out;
    }
    write_manifest(out_dir, manifest);
    return code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace graphgp::cli
