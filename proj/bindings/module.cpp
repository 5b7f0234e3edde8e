#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "motiq/evolve.hpp"
#include "motiq/expr.hpp"
#include "motiq/sweep.hpp"

namespace py = pybind11;
using namespace motiq;
using nlohmann::json;

namespace {

Motif motif_from_json_str(const std::string& text) {
  return Motif::from_json(json::parse(text));
}

py::list graphs_as_dicts(const std::vector<PrimitiveGraph>& graphs) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(graphs_to_json(graphs).dump());
}

}  // namespace

PYBIND11_MODULE(_motiq, m) {
  m.doc() = "Hierarchical circuit architectures: motifs, graphs, simulation, "
            "training and search";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

  py::class_<Motif>(m, "Motif")
      .def("__eq__", [](const Motif& a, const Motif& b) { return a == b; })
      .def("__add__", [](const Motif& a, const Motif& b) { return a + b; })
      .def("__mul__", [](const Motif& a, int k) { return a * k; })
      .def("__repr__", [](const Motif& m_) { return to_expr(m_); })
      .def("level", &Motif::level)
      .def("is_primitive", &Motif::is_primitive)
      .def("flatten_size", [](const Motif& m_) { return m_.flatten().size(); })
      .def("to_json", [](const Motif& m_) { return m_.to_json().dump(); })
      .def_static("from_json", &motif_from_json_str);

  m.def("qfree", py::overload_cast<int>(&qfree), py::arg("n"));
  m.def("qconv", py::overload_cast<int, int, int>(&qconv), py::arg("stride") = 1,
        py::arg("step") = 1, py::arg("offset") = 0);
  m.def(
      "qpool",
      [](int stride, const std::string& filter) {
        return qpool(stride, FilterSpec{filter});
      },
      py::arg("stride"), py::arg("filter"));
  m.def("qdense", py::overload_cast<>(&qdense));
  m.def("parse", &parse_motif_expr, py::arg("text"));
  m.def("to_expr", &to_expr, py::arg("motif"));
  m.def("reverse_binary_tree",
        [](int qubits, int conv_stride, int pool_stride, const std::string& filter,
           const std::string& conv_mapping, const std::string& pool_mapping) {
          return reverse_binary_tree(qubits, conv_stride, pool_stride,
                                     FilterSpec{filter}, conv_mapping,
                                     pool_mapping);
        },
        py::arg("qubits"), py::arg("conv_stride") = 1, py::arg("pool_stride") = 0,
        py::arg("filter") = "right", py::arg("conv_mapping") = "u_ttn",
        py::arg("pool_mapping") = "v_pool");

  m.def("resolve_graphs",
        [](const Motif& motif) { return graphs_as_dicts(resolve(motif)); },
        py::arg("motif"));
  m.def("draw", [](const Motif& motif) { return to_dot(resolve(motif)); },
        py::arg("motif"));
  m.def("expand_filter",
        [](const std::string& f, int k) { return expand_filter(FilterSpec{f}, k); },
        py::arg("filter"), py::arg("k"));
  m.def("unitary_counts", [](const Motif& motif) {
    const auto counts = count_unitaries(resolve(motif));
    return py::dict(py::arg("convolution") = counts.convolution,
                    py::arg("pooling") = counts.pooling,
                    py::arg("encoding") = counts.encoding,
                    py::arg("measurement") = counts.measurement,
                    py::arg("total") = counts.total());
  });

  py::class_<Registry>(m, "Registry")
      .def_static("defaults", &Registry::defaults)
      .def("names", &Registry::names)
      .def("param_count",
           [](const Registry& r, const std::string& name) {
             return r.at(name).param_count;
           })
      .def("add_motif_mapping", &Registry::add_motif_mapping);

  py::class_<CircuitProgram>(m, "Program")
      .def_property_readonly("num_qubits",
                             [](const CircuitProgram& p) { return p.num_qubits; })
      .def_property_readonly("readout",
                             [](const CircuitProgram& p) { return p.readout + 1; })
      .def("param_count", &CircuitProgram::param_count)
      .def("model_unitary_count", &CircuitProgram::model_unitary_count)
      .def("to_qasm", [](const CircuitProgram& p, const Eigen::VectorXd& params) {
        return to_qasm(p, params);
      });

  m.def("compile",
        [](const Motif& motif, const Registry& registry) {
          return compile(resolve(motif), registry);
        },
        py::arg("motif"), py::arg("registry"));
  m.def("run",
        [](const CircuitProgram& prog, const Eigen::VectorXd& params,
           const Eigen::VectorXcd& input) { return run(prog, params, input); },
        py::arg("program"), py::arg("params"), py::arg("state"));
  m.def("zero_state", &zero_state, py::arg("num_qubits"));
  m.def("readout_probability",
        [](const Eigen::VectorXcd& psi, int qubit) {
          return readout_probability(psi, qubit - 1);
        },
        py::arg("state"), py::arg("qubit"));
  m.def("expectation_z",
        [](const Eigen::VectorXcd& psi, int qubit) {
          return expectation_z(psi, qubit - 1);
        },
        py::arg("state"), py::arg("qubit"));
  m.def("encode",
        [](const Eigen::VectorXd& data, const std::string& scheme, int qubits) {
          return encode(data, encoding_from_string(scheme), qubits);
        },
        py::arg("data"), py::arg("scheme"), py::arg("qubits"));

  m.def("ground_state",
        [](int sites, double j, double h1, double h2) {
          GroundState gs = ground_state({sites, j, h1, h2});
          return py::make_tuple(gs.energy, gs.state);
        },
        py::arg("sites"), py::arg("j") = 1.0, py::arg("h1") = 0.0,
        py::arg("h2") = 0.0);
  m.def("sample_complexity", &sample_complexity, py::arg("p"),
        py::arg("m_cap") = 500.0, py::arg("literal_form") = false);

  m.def("fit",
        [](const CircuitProgram& prog, const Eigen::MatrixXd& features,
           const std::vector<int>& labels, const std::string& encoding,
           int epochs, double learning_rate, uint64_t seed, int folds) {
          Dataset data;
          data.features = features;
          data.labels = labels;
          TrainConfig cfg;
          cfg.epochs = epochs;
          cfg.learning_rate = learning_rate;
          cfg.seed = seed;
          cfg.folds = folds;
          FitResult fitted =
              fit(prog, data, encoding_from_string(encoding), cfg);
          return py::make_tuple(fitted.params, fitted.train_cost,
                                fitted.val_cost, fitted.best_epoch);
        },
        py::arg("program"), py::arg("features"), py::arg("labels"),
        py::arg("encoding") = "qubit", py::arg("epochs") = 50,
        py::arg("learning_rate") = 0.05, py::arg("seed") = 0,
        py::arg("folds") = 1);
  m.def("evaluate",
        [](const CircuitProgram& prog, const Eigen::VectorXd& params,
           const Eigen::MatrixXd& features, const std::vector<int>& labels,
           const std::string& encoding) {
          Dataset data;
          data.features = features;
          data.labels = labels;
          EvalResult ev =
              evaluate(prog, params, data, encoding_from_string(encoding), false);
          return py::make_tuple(ev.accuracy, ev.mean_cost);
        },
        py::arg("program"), py::arg("params"), py::arg("features"),
        py::arg("labels"), py::arg("encoding") = "qubit");

  m.def("enumerate_sweep_size", [](int qubits) {
    SweepSpec spec;
    spec.qubits = qubits;
    return enumerate_sweep(spec).size();
  });

  m.def("run_search",
        [](int qubits, int pool, int generations, double pressure, uint64_t seed,
           const std::function<double(const std::string&, int)>& fitness) {
          SearchConfig cfg;
          cfg.qubits = qubits;
          cfg.pool_size = pool;
          cfg.generations = generations;
          cfg.pressure = pressure;
          cfg.seed = seed;
          Registry registry = Registry::defaults();
          FitnessFn fn = [&fitness, &registry](Genotype& g, uint64_t) {
            g.n_params = genotype_param_count(g.motif, registry);
            return fitness(g.motif.to_json().dump(), g.n_params);
          };
          SearchResult res = run_search(cfg, fn);
          const Genotype& best = res.table.at(res.best_id);
          return py::make_tuple(best.motif, *best.fitness, res.table.size());
        },
        py::arg("qubits"), py::arg("pool"), py::arg("generations"),
        py::arg("pressure") = 0.05, py::arg("seed") = 0, py::arg("fitness"));
}
