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

#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphgp/error.hpp"
#include "graphgp/evaluation.hpp"
#include "graphgp/gp_engine.hpp"
#include "graphgp/graph.hpp"
#include "graphgp/spectral_learner.hpp"
#include "graphgp/synth.hpp"
#include "graphgp/version.hpp"

namespace py = pybind11;
using namespace graphgp;

namespace {

InputKernelConfig make_input(const std::optional<Eigen::MatrixXd>& covariance,
                             std::optional<double> lengthscale) {
  if (covariance && lengthscale) {
    throw ValidationError("give either a covariance or a lengthscale, not both");
  }
  if (covariance) return InputKernelConfig::precomputed(*covariance);
  if (lengthscale) return InputKernelConfig::squared_exponential(*lengthscale, 1.0);
  return InputKernelConfig::independent();
}

Eigen::MatrixXd default_inputs(const std::optional<Eigen::MatrixXd>& inputs, Eigen::Index n) {
  return inputs ? *inputs : index_inputs(n);
}

py::dict dataset_dict(const SyntheticDataset& ds) {
  py::dict d;
  d["adjacency"] = ds.graph.adjacency();
  d["inputs"] = ds.inputs;
  d["signals"] = ds.signals;
  d["theta"] = Eigen::VectorXd(ds.truth.polynomial.coefficients());
  d["noise_variance"] = ds.noise_variance;
  d["input_covariance"] = ds.input_covariance;
  d["seed"] = ds.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian process regression on graph signals with learned spectral kernels";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "laplacian",
      [](const Eigen::MatrixXd& a, const std::string& variant) {
        return laplacian(Graph(a), parse_laplacian_variant(variant));
      },
      py::arg("adjacency"), py::arg("variant") = "combinatorial");

  m.def(
      "eigendecompose",
      [](const Eigen::MatrixXd& a, const std::string& variant) {
        const SpectralDecomposition sd = decompose(Graph(a), parse_laplacian_variant(variant));
        return py::make_tuple(sd.eigenvalues, sd.eigenvectors);
      },
      py::arg("adjacency"), py::arg("variant") = "scaled",
      "Eigenvalues (ascending) and eigenvectors of a Laplacian of the graph.");

  m.def(
      "random_graph",
      [](const std::string& kind, int n, std::uint64_t seed) {
        RandomGraphParams p;
        if (kind == "sensor") {
          p.kind = RandomGraphKind::sensor;
        } else if (kind == "ba" || kind == "barabasi-albert") {
          p.kind = RandomGraphKind::barabasi_albert;
        } else {
          throw ValidationError("unknown graph kind '" + kind + "'");
        }
        p.num_nodes = n;
        return random_graph(p, seed).adjacency();
      },
      py::arg("kind") = "sensor", py::arg("num_nodes") = 30, py::arg("seed") = 0);

  m.def(
      "knn_graph",
      [](const Eigen::MatrixXd& coords, int k) { return knn_graph(coords, k).adjacency(); },
      py::arg("coords"), py::arg("k"));

  m.def(
      "generate_filtered_signals",
      [](const Eigen::MatrixXd& a, const std::string& filter, Eigen::Index n,
         std::optional<double> snr_db, std::uint64_t seed) {
        return dataset_dict(
            generate_filtered_signals(Graph(a), GroundTruthFilter::parse(filter), n, snr_db, seed));
      },
      py::arg("adjacency"), py::arg("filter") = "lowpass-taylor", py::arg("num_signals") = 50,
      py::arg("snr_db") = 10.0, py::arg("seed") = 0);

  m.def(
      "generate_wishart_dataset",
      [](const Eigen::MatrixXd& a, const std::string& filter, Eigen::Index n, std::uint64_t seed,
         std::optional<double> snr_db) {
        return dataset_dict(
            generate_wishart_dataset(Graph(a), GroundTruthFilter::parse(filter), n, seed, snr_db));
      },
      py::arg("adjacency"), py::arg("filter") = "bandpass", py::arg("num_signals") = 50,
      py::arg("seed") = 0, py::arg("snr_db") = std::nullopt);

  m.def(
      "log_marginal_likelihood",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& beta, const Eigen::MatrixXd& signals,
         double noise_variance, std::optional<Eigen::MatrixXd> inputs,
         std::optional<Eigen::MatrixXd> covariance, std::optional<double> lengthscale) {
        GraphContext ctx{Graph(a)};
        Hyperparameters h{PolynomialGraphFilter(beta), make_input(covariance, lengthscale),
                          noise_variance};
        return log_marginal_likelihood(h, {default_inputs(inputs, signals.rows()), signals}, ctx);
      },
      py::arg("adjacency"), py::arg("beta"), py::arg("signals"), py::arg("noise_variance"),
      py::arg("inputs") = std::nullopt, py::arg("covariance") = std::nullopt,
      py::arg("lengthscale") = std::nullopt);

  m.def(
      "fit_polynomial",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& signals, int degree,
         const std::string& hint, bool constrained, std::optional<Eigen::MatrixXd> inputs,
         std::optional<Eigen::MatrixXd> covariance, bool squared_exponential, std::uint64_t seed,
         int max_outer_iterations) {
        GraphContext ctx{Graph(a)};
        OptimizerConfig cfg;
        cfg.seed = seed;
        cfg.max_outer_iterations = max_outer_iterations;
        InputKernelConfig tmpl = make_input(
            covariance, squared_exponential ? std::optional<double>(1.0) : std::nullopt);
        const FitReport rep =
            fit_polynomial({default_inputs(inputs, signals.rows()), signals}, ctx, degree,
                           parse_spectrum_hint(hint), tmpl, cfg, constrained);
        py::dict d;
        d["beta"] = Eigen::VectorXd(rep.hyperparameters.polynomial().coefficients());
        d["noise_variance"] = rep.hyperparameters.noise_variance;
        if (rep.hyperparameters.input.has_lengthscale()) {
          d["lengthscale"] = rep.hyperparameters.input.lengthscale;
        }
        d["log_likelihood"] = rep.log_likelihood;
        d["feasible"] = rep.feasible;
        d["converged"] = rep.converged;
        d["iterations"] = rep.iterations;
        d["min_spectrum"] = rep.min_spectrum;
        return d;
      },
      py::arg("adjacency"), py::arg("signals"), py::arg("degree") = 2,
      py::arg("hint") = "lowpass", py::arg("constrained") = true,
      py::arg("inputs") = std::nullopt, py::arg("covariance") = std::nullopt,
      py::arg("squared_exponential") = false, py::arg("seed") = 0,
      py::arg("max_outer_iterations") = 2000);

  m.def(
      "fit_baseline",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& signals, const std::string& kind,
         std::optional<Eigen::MatrixXd> inputs, std::optional<Eigen::MatrixXd> covariance,
         int p) {
        GraphContext ctx{Graph(a)};
        BaselineGraphKernel b;
        b.kind = parse_baseline_kind(kind);
        b.p = p;
        const UnconstrainedResult rep =
            fit_baseline({default_inputs(inputs, signals.rows()), signals}, ctx, b,
                         make_input(covariance, std::nullopt), OptimizerConfig{});
        py::dict d;
        d["kind"] = std::string(to_string(b.kind));
        d["alpha"] = rep.hyperparameters.baseline().alpha;
        d["input_variance"] = rep.hyperparameters.input.variance;
        d["noise_variance"] = rep.hyperparameters.noise_variance;
        d["log_likelihood"] = rep.trace.back();
        return d;
      },
      py::arg("adjacency"), py::arg("signals"), py::arg("kind") = "standard",
      py::arg("inputs") = std::nullopt, py::arg("covariance") = std::nullopt, py::arg("p") = 1);

  m.def(
      "posterior_predict",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& beta, const Eigen::MatrixXd& signals,
         double noise_variance, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& test_inputs,
         std::optional<Eigen::MatrixXd> covariance, std::optional<double> lengthscale) {
        GraphContext ctx{Graph(a)};
        Hyperparameters h{PolynomialGraphFilter(beta), make_input(covariance, lengthscale),
                          noise_variance};
        const Posterior post = posterior_predict(h, {inputs, signals}, ctx, test_inputs);
        return py::make_tuple(post.mean, post.covariance);
      },
      py::arg("adjacency"), py::arg("beta"), py::arg("signals"), py::arg("noise_variance"),
      py::arg("inputs"), py::arg("test_inputs"), py::arg("covariance") = std::nullopt,
      py::arg("lengthscale") = std::nullopt,
      "Posterior means (one row per test input) and per-input covariance matrices.");

  m.def(
      "spectrum",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& beta, double step) {
        GraphContext ctx{Graph(a)};
        const auto rows = spectrum_export(PolynomialGraphFilter(beta), ctx, step);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), 4);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          out.row(static_cast<Eigen::Index>(i)) << rows[i].lambda, rows[i].value, rows[i].scaled,
              rows[i].eigenvalue ? 1.0 : 0.0;
        }
        return out;
      },
      py::arg("adjacency"), py::arg("beta"), py::arg("grid_step") = 0.01,
      "Rows of (lambda, g, g scaled to peak 1, is-eigenvalue flag).");
}
