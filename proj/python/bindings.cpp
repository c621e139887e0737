#include "graphmarkov/graphmarkov.hpp"

#ifdef GRAPHMARKOV_WITH_CLI
#include "cli.hpp"
#endif

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace gmn;

namespace {

/// Windows given as (B, n, S) arrays, oldest step first.
std::vector<Sample> samples_from_arrays(const py::array_t<double, py::array::c_style | py::array::forcecast>& inputs,
                                        const py::array_t<double, py::array::c_style | py::array::forcecast>& masks) {
  if (inputs.ndim() != 3 || masks.ndim() != 3) throw std::invalid_argument("inputs and masks must be (B, n, S) arrays");
  for (int d = 0; d < 3; ++d) {
    if (inputs.shape(d) != masks.shape(d)) throw std::invalid_argument("inputs and masks shapes differ");
  }
  const auto b = inputs.shape(0);
  const auto n = inputs.shape(1);
  const auto s = inputs.shape(2);
  const auto x = inputs.unchecked<3>();
  const auto m = masks.unchecked<3>();
  std::vector<Sample> samples(static_cast<std::size_t>(b));
  for (py::ssize_t k = 0; k < b; ++k) {
    Sample& sample = samples[static_cast<std::size_t>(k)];
    sample.inputs.resize(n, s);
    sample.input_mask.resize(n, s);
    for (py::ssize_t r = 0; r < n; ++r) {
      for (py::ssize_t c = 0; c < s; ++c) {
        sample.input_mask(r, c) = m(k, r, c);
        sample.inputs(r, c) = m(k, r, c) != 0.0 ? x(k, r, c) : 0.0;
      }
    }
    sample.label = Vector::Zero(s);
    sample.label_mask = Vector::Ones(s);
  }
  return samples;
}

StateSeries series_from(const Matrix& values, const std::optional<Matrix>& mask) {
  StateSeries series = make_series(values);
  if (mask) {
    if (mask->rows() != values.rows() || mask->cols() != values.cols()) {
      throw std::invalid_argument("mask shape differs from values");
    }
    series.mask = *mask;
    series.values = values.cwiseProduct(*mask);
  }
  return series;
}

/// Holder so pybind11 binds a class instead of applying its std::variant caster.
struct Model {
  ModelParams params;
};

py::dict metrics_dict(const MetricsReport& r) {
  py::dict d;
  d["mae"] = r.mae;
  d["mape"] = r.mape;
  d["rmse"] = r.rmse;
  d["evaluated_count"] = r.evaluated_count;
  d["excluded_zero_truth_count"] = r.excluded_zero_truth_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph Markov network forecasting (C++ core)";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def(py::init(&build_graph), py::arg("adjacency"),
           "Binary undirected graph from a square nonnegative (possibly weighted) matrix.")
      .def_property_readonly("size", &Graph::size)
      .def_property_readonly("adjacency", &Graph::adjacency)
      .def_property_readonly("self_adjacency", &Graph::self_adjacency)
      .def_property_readonly("degree", &Graph::degree)
      .def("hop_masks", [](const Graph& g, int n) { return hop_masks(g, n).masks(); }, py::arg("n"),
           "Masks of orders 1..n as a list of S x S arrays.")
      .def("laplacian", &normalized_laplacian)
      .def("spectral_basis", [](const Graph& g) {
        const SpectralBasis b = laplacian_basis(g);
        return py::make_tuple(b.eigenvalues, b.eigenvectors);
      });

  m.def("random_ring_graph", &random_ring_graph, py::arg("nodes"), py::arg("chord_probability") = 0.1,
        py::arg("seed") = 0);

  m.def(
      "spectral_basis",
      [](const Matrix& symmetric) {
        const SpectralBasis b = spectral_basis(symmetric);
        return py::make_tuple(b.eigenvalues, b.eigenvectors);
      },
      py::arg("matrix"), "Ascending eigenvalues and sign-normalized eigenvectors of a symmetric matrix.");

  m.def(
      "simulate",
      [](const Graph& g, Index steps, std::uint64_t seed, double gamma, double noise_std) {
        const TransitionSpec spec = random_transition(g, seed, gamma, noise_std);
        const StateSeries series = simulate_gmp(g, spec, steps, seed + 1);
        return py::make_tuple(series.values, spec.transition);
      },
      py::arg("graph"), py::arg("steps"), py::arg("seed") = 0, py::arg("gamma") = 0.9, py::arg("noise_std") = 0.01,
      "Returns (values T x S, transition P).");

  m.def(
      "inject_missing",
      [](const Matrix& values, double rate, std::uint64_t seed) {
        const StateSeries out = inject_missing(make_series(values), rate, seed);
        return py::make_tuple(out.values, out.mask);
      },
      py::arg("values"), py::arg("rate"), py::arg("seed") = 0, "Returns (values, mask) with missing entries zeroed.");

  m.def(
      "read_series",
      [](const std::filesystem::path& path) {
        const StateSeries s = ingest_csv(path);
        return py::make_tuple(s.values, s.mask, s.timestamps);
      },
      py::arg("path"), "Reads a speed CSV into (values, mask, timestamps).");

  py::class_<Model>(m, "Model")
      .def_static(
          "gmn", [](const Graph& g, int n, double gamma) { return Model{init_gmn(g, n, gamma)}; },
          py::arg("graph"), py::arg("n") = 10, py::arg("gamma") = 0.9)
      .def_static(
          "sgmn",
          [](const Graph& g, int n, double gamma) { return Model{init_sgmn(laplacian_basis(g), n, gamma)}; },
          py::arg("graph"), py::arg("n") = 10, py::arg("gamma") = 0.9)
      .def_property_readonly("kind", [](const Model& m) { return to_string(kind_of(m.params)); })
      .def_property_readonly("history", [](const Model& m) { return history_of(m.params); })
      .def_property_readonly("sensors", [](const Model& m) { return sensors_of(m.params); })
      .def_property_readonly("gamma", [](const Model& m) { return gamma_of(m.params); })
      .def(
          "effective_weight", [](const Model& m, int k) { return effective_weight(m.params, k); }, py::arg("k"))
      .def(
          "predict",
          [](const Model& model, const py::array_t<double, py::array::c_style | py::array::forcecast>& inputs,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& masks) {
            return predict(model.params, samples_from_arrays(inputs, masks));
          },
          py::arg("inputs"), py::arg("masks"), "One-step forecasts for (B, n, S) windows, oldest step first.")
      .def(
          "influence",
          [](const Model& model, int k, const std::string& mode) {
            const InfluenceTable t = influence_scores(model.params, k, parse_influence_mode(mode));
            return py::make_tuple(t.scores, t.ranks);
          },
          py::arg("k") = 1, py::arg("mode") = "row", "Returns (scores, ranks); rank 1 is most influential.")
      .def(
          "save",
          [](const Model& model, const std::filesystem::path& path, const Matrix& adjacency) {
            Checkpoint c;
            c.params = model.params;
            c.adjacency = adjacency;
            save_checkpoint(path, c);
          },
          py::arg("path"), py::arg("adjacency"))
      .def_static(
          "load", [](const std::filesystem::path& path) { return Model{load_checkpoint(path).params}; }, py::arg("path"));

  m.def(
      "fit",
      [](const Model& initial, const Matrix& train_values, const std::optional<Matrix>& train_mask,
         const Matrix& val_values, const std::optional<Matrix>& val_mask, int batch_size, double lr, int max_epochs,
         double min_delta, std::uint64_t seed) {
        const int n = history_of(initial.params);
        const auto train_samples = window(series_from(train_values, train_mask), n);
        const auto val_samples = window(series_from(val_values, val_mask), n);
        TrainConfig config;
        config.batch_size = batch_size;
        config.lr_init = lr;
        config.lr_floor = std::min(config.lr_floor, lr);
        config.max_epochs = max_epochs;
        config.min_delta = min_delta;
        config.seed = seed;
        TrainResult result;
        {
          py::gil_scoped_release release;
          result = train(initial.params, train_samples, val_samples, config);
        }
        py::list history;
        for (const auto& e : result.history.epochs) {
          py::dict row;
          row["epoch"] = e.epoch;
          row["train_loss"] = e.train_loss;
          row["val_loss"] = e.val_loss;
          row["lr"] = e.lr;
          history.append(row);
        }
        return py::make_tuple(Model{result.params}, history);
      },
      py::arg("model"), py::arg("train_values"), py::arg("train_mask") = py::none(), py::arg("val_values"),
      py::arg("val_mask") = py::none(), py::arg("batch_size") = 64, py::arg("lr") = 1e-3, py::arg("max_epochs") = 200,
      py::arg("min_delta") = 1e-5, py::arg("seed") = 0,
      "Trains on normalized T x S series. Returns (best model, per-epoch history).");

  m.def(
      "metrics",
      [](const Matrix& pred, const Matrix& truth, const std::optional<Matrix>& mask, double min, double max) {
        const Matrix m = mask ? *mask : Matrix::Ones(truth.rows(), truth.cols());
        return metrics_dict(metrics(pred, truth, m, NormStats{min, max}));
      },
      py::arg("pred"), py::arg("truth"), py::arg("mask") = py::none(), py::arg("min") = 0.0, py::arg("max") = 1.0,
      "MAE, MAPE (%) and RMSE after mapping normalized values back with [min, max].");

#ifdef GRAPHMARKOV_WITH_CLI
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> argv{"gmn"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::ostringstream out, err;
        const int code = cli::run(argv, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a gmn subcommand in-process. Returns (exit code, stdout, stderr).");
#endif
}
