#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "invnet/config.hpp"
#include "invnet/error.hpp"
#include "invnet/io.hpp"
#include "invnet/training.hpp"

namespace py = pybind11;
using namespace invnet;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-D array", 1, static_cast<std::size_t>(a.ndim()));
  return Vector(std::span<const double>(a.data(), static_cast<std::size_t>(a.shape(0))));
}

Array from_vector(const Vector& v) {
  Array out(static_cast<py::ssize_t>(v.dim()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<Vector> to_rows(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D array", 2, static_cast<std::size_t>(a.ndim()));
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<Vector> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) out.emplace_back(std::span<const double>(a.data() + r * cols, cols));
  return out;
}

Array from_rows(const std::vector<Vector>& rows, std::size_t dim) {
  Array out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(dim)});
  double* p = out.mutable_data();
  for (const Vector& v : rows) p = std::copy(v.begin(), v.end(), p);
  return out;
}

Array from_matrix(const Matrix& m) {
  Array out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

// Applies fn row by row to a 1-D or 2-D array.
template <class Fn>
Array map_rows(const InvertibleNet& net, const Array& a, Fn fn) {
  if (a.ndim() == 1) return from_vector(fn(to_vector(a)));
  std::vector<Vector> out;
  for (const Vector& row : to_rows(a)) out.push_back(fn(row));
  return from_rows(out, net.dim());
}

PairedSamples to_samples(const Array& inputs, const Array& targets) {
  PairedSamples s{to_rows(inputs), to_rows(targets)};
  if (s.inputs.size() != s.targets.size())
    throw DimensionError("inputs and targets must have the same row count", s.inputs.size(), s.targets.size());
  return s;
}

py::dict samples_dict(const PairedSamples& s) {
  py::dict d;
  const std::size_t dim = s.empty() ? 0 : s.dim();
  d["inputs"] = from_rows(s.inputs, dim);
  d["targets"] = from_rows(s.targets, dim);
  return d;
}

nlohmann::json parse_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  return j;
}

py::dict metrics_dict(const EvalMetrics& m) {
  py::dict d;
  d["eval_mse"] = m.eval_mse;
  d["eval_max_abs"] = m.eval_max_abs;
  d["inversion_error"] = m.inversion_error;
  d["inversion_max_abs"] = m.inversion_max_abs;
  d["round_trip_error"] = m.round_trip_error;
  d["determinant_product"] = m.determinant_product;
  d["condition"] = m.condition;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "LU-structured invertible networks";

  auto base = py::register_exception<Error>(m, "InvnetError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<CorruptArtifactError>(m, "CorruptArtifactError", base.ptr());

  py::class_<TriangularParams>(m, "TriangularParams")
      .def(py::init<std::size_t, double>(), py::arg("n"), py::arg("diagonal") = 1.0)
      .def(py::init<std::size_t, std::vector<double>, std::vector<double>, std::vector<double>>(), py::arg("n"),
           py::arg("lower"), py::arg("upper"), py::arg("diagonal"))
      .def_property_readonly("n", &TriangularParams::n)
      .def_property_readonly("lower", [](const TriangularParams& p) { return std::vector<double>(p.lower().begin(), p.lower().end()); })
      .def_property_readonly("upper", [](const TriangularParams& p) { return std::vector<double>(p.upper().begin(), p.upper().end()); })
      .def_property_readonly("diagonal", [](const TriangularParams& p) { return std::vector<double>(p.diagonal().begin(), p.diagonal().end()); })
      .def("weight", [](const TriangularParams& p) { return from_matrix(compose_weight(p)); })
      .def("apply", [](const TriangularParams& p, const Array& x) { return from_vector(apply_weight(p, to_vector(x))); })
      .def("solve", [](const TriangularParams& p, const Array& b) { return from_vector(solve_weight(p, to_vector(b))); })
      .def("determinant", [](const TriangularParams& p) { return determinant(p); })
      .def("condition", [](const TriangularParams& p) { return condition_1norm(p); });

  py::class_<InvertibleNet>(m, "Net")
      .def_static(
          "initialize",
          [](std::size_t dim, std::size_t depth, double alpha, std::vector<double> diagonals, bool leaky_final,
             double init_scale, double bias_scale, std::uint64_t seed) {
            NetConfig cfg;
            cfg.dim = dim;
            cfg.depth = depth;
            cfg.alpha = alpha;
            cfg.diagonals = std::move(diagonals);
            cfg.final_activation = leaky_final ? FinalActivation::kLeakyReLU : FinalActivation::kIdentity;
            cfg.init_scale = init_scale;
            cfg.bias_scale = bias_scale;
            return InvertibleNet::initialize(cfg, seed);
          },
          py::arg("dim"), py::arg("depth") = 3, py::arg("alpha") = 0.1, py::arg("diagonals") = std::vector<double>{},
          py::arg("leaky_final") = false, py::arg("init_scale") = 0.1, py::arg("bias_scale") = 0.0,
          py::arg("seed") = 0)
      .def_property_readonly("dim", &InvertibleNet::dim)
      .def_property_readonly("depth", &InvertibleNet::depth)
      .def("layer", [](const InvertibleNet& net, std::size_t b) { return net.block(b).linear.params(); })
      .def("forward", [](const InvertibleNet& net, const Array& x) {
        return map_rows(net, x, [&](const Vector& v) { return net_forward(net, v); });
      })
      .def("inverse", [](const InvertibleNet& net, const Array& y) {
        return map_rows(net, y, [&](const Vector& v) { return net_inverse(net, v); });
      })
      .def("noisy_inverse",
           [](const InvertibleNet& net, const Array& y, double variance, std::uint64_t seed) {
             return from_vector(noise_perturbed_inversion(net, to_vector(y), variance, seed));
           },
           py::arg("y"), py::arg("variance"), py::arg("seed") = 0)
      .def("round_trip_error", [](const InvertibleNet& net, const Array& xs) { return round_trip_error(net, to_rows(xs)); })
      .def("determinant", &determinant_product)
      .def("conditions", &condition_estimates)
      .def("inverse_lipschitz_bound", &inverse_lipschitz_bound)
      .def("__eq__", [](const InvertibleNet& a, const InvertibleNet& b) { return a == b; })
      .def("to_json", [](const InvertibleNet& net) { return checkpoint_to_string(Checkpoint{net, {}}); })
      .def_static("from_json", [](const std::string& text) { return checkpoint_from_string(text).net; });

  m.def("default_config", [](const std::string& kind) { return to_json(default_run_config(kind)).dump(); },
        py::arg("kind"), "Default run config for a task kind, as a JSON string.");

  m.def(
      "generate",
      [](const std::string& config_json) {
        const GeneratedData gen = generate_task_data(parse_run_config(parse_json(config_json)));
        py::dict out;
        out["train"] = samples_dict(gen.data.train);
        out["eval"] = samples_dict(gen.data.eval);
        out["meta"] = gen.meta.dump();
        if (gen.oracle) out["oracle"] = *gen.oracle;
        return out;
      },
      py::arg("config_json"), "Dataset for a JSON run config.");

  m.def(
      "train",
      [](const std::string& config_json, const Array& train_x, const Array& train_y, const Array& eval_x,
         const Array& eval_y) {
        const RunConfig cfg = parse_run_config(parse_json(config_json));
        TrainConfig tc = cfg.train;
        tc.seed = cfg.seed;
        SplitDataset data{to_samples(train_x, train_y), to_samples(eval_x, eval_y)};
        FitResult result = [&] {
          py::gil_scoped_release release;
          return fit(InvertibleNet::initialize(cfg.net, cfg.seed), data, tc);
        }();
        py::list history;
        for (const MetricsRecord& r : result.history) history.append(py::module_::import("json").attr("loads")(to_json(r).dump()));
        return py::make_tuple(std::move(result.net), history);
      },
      py::arg("config_json"), py::arg("train_x"), py::arg("train_y"), py::arg("eval_x"), py::arg("eval_y"),
      "Initialize from the config, fit, and return (net, per-epoch metrics).");

  m.def(
      "evaluate",
      [](const InvertibleNet& net, const Array& x, const Array& y) { return metrics_dict(evaluate(net, to_samples(x, y))); },
      py::arg("net"), py::arg("inputs"), py::arg("targets"));
}
