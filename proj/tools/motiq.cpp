// motiq: build, inspect, train and search hierarchical circuit
// architectures from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "motiq/evolve.hpp"
#include "motiq/expr.hpp"
#include "motiq/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace motiq;

namespace {

struct CommonOpts {
  std::string out_dir;
  std::string config_path;
  uint64_t seed = 0;
  std::string expr;
  std::string motif_json;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_motif = true) {
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--seed", o.seed, "Random seed");
  if (with_motif) {
    cmd->add_option("--expr", o.expr, "Inline motif expression");
    cmd->add_option("--motif-json", o.motif_json, "Motif JSON file");
  }
}

Motif load_motif(const CommonOpts& o) {
  if (!o.expr.empty() && !o.motif_json.empty())
    throw ConfigError("give either --expr or --motif-json, not both");
  if (!o.expr.empty()) return parse_motif_expr(o.expr);
  if (!o.motif_json.empty()) {
    std::ifstream in(o.motif_json);
    if (!in) throw ConfigError("cannot open motif file: " + o.motif_json);
    json j;
    in >> j;
    return Motif::from_json(j);
  }
  throw ConfigError("a motif is required (--expr or --motif-json)");
}

fs::path ensure_out(const CommonOpts& o) {
  if (o.out_dir.empty()) return {};
  fs::create_directories(o.out_dir);
  return fs::path(o.out_dir);
}

void persist_config(const fs::path& out, const std::string& task, json effective) {
  if (out.empty()) return;
  effective["task"] = task;
  std::ofstream f(out / "run_config.json");
  f << effective.dump(2) << "\n";
}

void emit(const fs::path& out, const std::string& name, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream f(out / name);
    f << text;
  }
}

// Values from an optional JSON config act as defaults; explicit flags win.
json load_config_json(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw ConfigError(std::string("cannot open config: ") + argv[i + 1]);
      json j;
      in >> j;
      return j;
    }
  return json::object();
}

template <typename T>
void from_config(const json& cfg, const std::string& key, T& target) {
  if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

TrainConfig train_options(CLI::App* cmd, const json& cfg) {
  TrainConfig t;
  from_config(cfg, "epochs", t.epochs);
  from_config(cfg, "learning_rate", t.learning_rate);
  from_config(cfg, "batch_size", t.batch_size);
  from_config(cfg, "folds", t.folds);
  cmd->add_option("--epochs", t.epochs, "Training epochs");
  cmd->add_option("--lr", t.learning_rate, "Learning rate");
  cmd->add_option("--batch", t.batch_size, "Batch size (0 = full batch)");
  cmd->add_option("--folds", t.folds, "Cross-validation folds");
  return t;
}

std::string optimizer_name;
std::string gradient_name;

void finish_train_config(TrainConfig& t, uint64_t seed) {
  t.seed = seed;
  if (optimizer_name == "gd")
    t.optimizer = Optimizer::GradientDescent;
  else if (!optimizer_name.empty() && optimizer_name != "adam")
    throw ConfigError("unknown optimizer: " + optimizer_name);
  if (gradient_name == "finite_difference")
    t.gradient = GradientMethod::FiniteDifference;
  else if (!gradient_name.empty() && gradient_name != "parameter_shift")
    throw ConfigError("unknown gradient method: " + gradient_name);
}

json params_to_json(const Eigen::VectorXd& p) {
  json arr = json::array();
  for (int i = 0; i < p.size(); ++i) arr.push_back(p[i]);
  return arr;
}

Eigen::VectorXd params_from_json(const json& j) {
  Eigen::VectorXd p(j.size());
  for (size_t i = 0; i < j.size(); ++i) p[i] = j[i].get<double>();
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical circuit architectures: build, draw, train, search"};
  app.require_subcommand(1);

  json cfg;
  try {
    cfg = load_config_json(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  Registry registry = Registry::defaults();

  // ---- build -------------------------------------------------------------
  auto* build = app.add_subcommand("build", "Resolve a motif and compile it");
  CommonOpts bo;
  from_config(cfg, "expr", bo.expr);
  add_common(build, bo);
  bool emit_qasm = false;
  build->add_flag("--qasm", emit_qasm, "Also export OpenQASM");
  build->callback([&] {
    Motif m = load_motif(bo);
    auto graphs = resolve(m);
    CircuitProgram prog = compile(graphs, registry);
    const fs::path out = ensure_out(bo);
    json summary{{"qubits", prog.num_qubits},
                 {"readout", prog.readout + 1},
                 {"parameters", prog.param_count()},
                 {"unitaries",
                  {{"convolution", prog.counts.convolution},
                   {"pooling", prog.counts.pooling},
                   {"encoding", prog.counts.encoding},
                   {"measurement", prog.counts.measurement},
                   {"total", prog.model_unitary_count()}}},
                 {"graphs", graphs_to_json(graphs)}};
    emit(out, "graphs.json", summary.dump(2) + "\n");
    if (emit_qasm)
      emit(out, "program.qasm",
           to_qasm(prog, Eigen::VectorXd::Zero(prog.param_count())));
    persist_config(out, "build", json{{"expr", bo.expr}, {"seed", bo.seed}});
  });

  // ---- draw --------------------------------------------------------------
  auto* draw = app.add_subcommand("draw", "Render the resolved graphs as DOT");
  CommonOpts dro;
  add_common(draw, dro);
  draw->callback([&] {
    Motif m = load_motif(dro);
    const fs::path out = ensure_out(dro);
    emit(out, "architecture.dot", to_dot(resolve(m)));
    persist_config(out, "draw", json{{"expr", dro.expr}, {"seed", dro.seed}});
  });

  // ---- train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train a motif on a CSV dataset");
  CommonOpts tro;
  add_common(train, tro);
  std::string data_path = cfg.value("data", "");
  std::string encoding_name = cfg.value("encoding", "qubit");
  TrainConfig tcfg = train_options(train, cfg);
  train->add_option("--data", data_path, "CSV dataset with a `label` column");
  train->add_option("--encoding", encoding_name, "qubit | iqp | amplitude");
  train->add_option("--optimizer", optimizer_name, "adam | gd");
  train->add_option("--gradient", gradient_name,
                    "parameter_shift | finite_difference");
  train->callback([&] {
    if (data_path.empty()) throw ConfigError("--data is required");
    Motif m = load_motif(tro);
    CircuitProgram prog = compile(resolve(m), registry);
    Dataset data = load_dataset_csv(data_path);
    const Encoding enc = encoding_from_string(encoding_name);
    data.features = minmax_scale(data.features, 0.0, encoding_scale_max(enc));
    stratified_split(data, 0.7, tro.seed);
    finish_train_config(tcfg, tro.seed);
    FitResult fitted = fit(prog, data, enc, tcfg);
    EvalResult train_eval = evaluate(prog, fitted.params, data, enc, false);
    EvalResult test_eval = evaluate(prog, fitted.params, data, enc, true);
    const fs::path out = ensure_out(tro);
    json report{{"parameters", params_to_json(fitted.params)},
                {"best_epoch", fitted.best_epoch},
                {"train_accuracy", train_eval.accuracy},
                {"train_cost", train_eval.mean_cost},
                {"test_accuracy", test_eval.accuracy},
                {"test_cost", test_eval.mean_cost}};
    emit(out, "trained.json", report.dump(2) + "\n");
    if (!out.empty()) write_history_csv((out / "history.csv").string(), fitted);
    persist_config(out, "train",
                   json{{"expr", tro.expr},
                        {"data", data_path},
                        {"encoding", encoding_name},
                        {"epochs", tcfg.epochs},
                        {"learning_rate", tcfg.learning_rate},
                        {"folds", tcfg.folds},
                        {"seed", tro.seed}});
  });

  // ---- sweep -----------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Train an architecture family");
  CommonOpts swo;
  add_common(sweep, swo, false);
  SweepSpec spec;
  from_config(cfg, "qubits", spec.qubits);
  std::string sweep_data = cfg.value("data", "");
  std::string sweep_encoding = cfg.value("encoding", "qubit");
  int sweep_seeds = cfg.value("seeds", 1);
  bool enumerate_only = false;
  TrainConfig swcfg = train_options(sweep, cfg);
  sweep->add_option("--data", sweep_data, "CSV dataset");
  sweep->add_option("--encoding", sweep_encoding, "qubit | iqp | amplitude");
  sweep->add_option("--qubits", spec.qubits, "Tree width");
  sweep->add_option("--conv-strides", spec.conv_strides, "Convolution strides");
  sweep->add_option("--pool-strides", spec.pool_strides, "Pooling strides");
  sweep->add_option("--filters", spec.filters, "Pooling filters");
  sweep->add_option("--ansatz", spec.ansatzes, "Convolution ansatz names");
  sweep->add_option("--seeds", sweep_seeds, "Trained instances per cell");
  sweep->add_flag("--enumerate", enumerate_only,
                  "List the family without training");
  sweep->callback([&] {
    const fs::path out = ensure_out(swo);
    if (enumerate_only) {
      auto cells = enumerate_sweep(spec);
      json arr = json::array();
      for (const auto& c : cells)
        arr.push_back(json{{"ansatz", c.ansatz},
                           {"filter", c.filter},
                           {"s_p", c.pool_stride},
                           {"s_c", c.conv_stride}});
      emit(out, "architectures.json",
           json{{"count", cells.size()}, {"architectures", arr}}.dump(2) + "\n");
      return;
    }
    if (sweep_data.empty()) throw ConfigError("--data is required");
    Dataset data = load_dataset_csv(sweep_data);
    const Encoding enc = encoding_from_string(sweep_encoding);
    data.features = minmax_scale(data.features, 0.0, encoding_scale_max(enc));
    stratified_split(data, 0.7, swo.seed);
    SweepOptions options;
    finish_train_config(swcfg, swo.seed);
    options.train = swcfg;
    options.encoding = enc;
    options.seeds = sweep_seeds;
    SweepResult result = run_sweep(spec, data, registry, options);
    if (out.empty()) throw ConfigError("sweep needs --out for its CSV files");
    write_sweep_matrix_csv(result, (out / "sweep_matrix.csv").string());
    write_sweep_long_csv(result, (out / "sweep_results.csv").string());
    persist_config(out, "sweep",
                   json{{"data", sweep_data},
                        {"encoding", sweep_encoding},
                        {"seeds", sweep_seeds},
                        {"epochs", swcfg.epochs},
                        {"seed", swo.seed}});
  });

  // ---- qpr-train -----------------------------------------------------------
  auto* qpr = app.add_subcommand("qpr-train",
                                 "Train a circuit on the phase-boundary line");
  CommonOpts qo;
  add_common(qpr, qo);
  LineSpec line;
  from_config(cfg, "sites", line.sites);
  std::string cache_dir = cfg.value("cache", "");
  TrainConfig qcfg = train_options(qpr, cfg);
  qpr->add_option("--sites", line.sites, "Spin count");
  qpr->add_option("--points", line.points, "Training points along the line");
  qpr->add_option("--cache", cache_dir, "Ground-state cache directory");
  qpr->callback([&] {
    Motif m = qo.expr.empty() && qo.motif_json.empty()
                  ? reverse_binary_tree(line.sites, 1, 0, FilterSpec{"right"})
                  : load_motif(qo);
    CircuitProgram prog = compile(resolve(m), registry);
    GroundStateCache cache(cache_dir);
    finish_train_config(qcfg, qo.seed);
    FitResult fitted = train_line(prog, line, qcfg, &cache);
    LinePoints pts = spt_line(line, &cache);
    std::vector<int> idx(pts.states.size());
    std::iota(idx.begin(), idx.end(), 0);
    EvalResult ev = evaluate_states(
        prog, fitted.params, [&pts](int i) { return pts.states[i]; }, pts.labels,
        idx);
    const fs::path out = ensure_out(qo);
    json report{{"sites", line.sites},
                {"points", line.points},
                {"parameters", params_to_json(fitted.params)},
                {"line_accuracy", ev.accuracy},
                {"line_cost", ev.mean_cost},
                {"motif", m.to_json()}};
    emit(out, "qpr_trained.json", report.dump(2) + "\n");
    if (!out.empty()) write_history_csv((out / "history.csv").string(), fitted);
    persist_config(out, "qpr-train",
                   json{{"sites", line.sites},
                        {"points", line.points},
                        {"epochs", qcfg.epochs},
                        {"seed", qo.seed}});
  });

  // ---- qpr-search ------------------------------------------------------------
  auto* search = app.add_subcommand("qpr-search",
                                    "Evolve architectures for phase recognition");
  CommonOpts so;
  add_common(search, so, false);
  SearchConfig scfg;
  LineSpec sline;
  std::vector<double> weight_list;
  std::string search_cache, resume_log;
  int train_epochs = cfg.value("train_epochs", 12);
  from_config(cfg, "sites", sline.sites);
  from_config(cfg, "pool", scfg.pool_size);
  from_config(cfg, "generations", scfg.generations);
  search->add_option("--sites", sline.sites, "Spin count");
  search->add_option("--pool", scfg.pool_size, "Initial population size");
  search->add_option("--pressure", scfg.pressure, "Tournament sample fraction");
  search->add_option("--workers", scfg.workers, "Parallel evaluators");
  search->add_option("--generations", scfg.generations, "Generations to run");
  search->add_option("--max-seconds", scfg.max_seconds, "Wall-clock budget");
  search->add_option("--weights", weight_list, "c1,c2,c3")->delimiter(',');
  search->add_option("--lambda", scfg.weights.lambda, "Parameter-count penalty");
  search->add_option("--mcap", scfg.weights.m_cap, "Sample-complexity cap");
  search->add_option("--train-epochs", train_epochs, "Budget per candidate");
  search->add_option("--cache", search_cache, "Ground-state cache directory");
  search->add_option("--resume", resume_log, "Continue from an event log");
  search->callback([&] {
    scfg.seed = so.seed;
    scfg.qubits = sline.sites;
    if (!weight_list.empty()) {
      if (weight_list.size() != 3) throw ConfigError("--weights takes c1,c2,c3");
      scfg.weights.c1 = weight_list[0];
      scfg.weights.c2 = weight_list[1];
      scfg.weights.c3 = weight_list[2];
    }
    const fs::path out = ensure_out(so);
    if (scfg.log_path.empty() && !out.empty())
      scfg.log_path = (out / "search_log.jsonl").string();
    GroundStateCache cache(search_cache);
    TrainConfig budget;
    budget.epochs = train_epochs;
    budget.learning_rate = 0.1;
    // candidates may carry matrix-exponential mappings, which the shift
    // rule refuses
    budget.gradient = GradientMethod::FiniteDifference;
    FitnessFn fitness =
        make_qpr_fitness(registry, sline, budget, scfg.weights, &cache);
    SearchResult result = resume_log.empty()
                              ? run_search(scfg, fitness)
                              : resume_search(resume_log, scfg, fitness);
    const Genotype& best = result.table.at(result.best_id);
    json report{{"best_id", best.id},
                {"best_fitness", *best.fitness},
                {"best_params", best.n_params},
                {"best_motif", best.motif.to_json()},
                {"evaluations", result.table.size()},
                {"skipped", result.skipped}};
    emit(out, "search_result.json", report.dump(2) + "\n");
    persist_config(out, "qpr-search",
                   json{{"sites", sline.sites},
                        {"pool", scfg.pool_size},
                        {"pressure", scfg.pressure},
                        {"generations", scfg.generations},
                        {"weights", {scfg.weights.c1, scfg.weights.c2,
                                     scfg.weights.c3}},
                        {"lambda", scfg.weights.lambda},
                        {"mcap", scfg.weights.m_cap},
                        {"train_epochs", train_epochs},
                        {"seed", so.seed}});
  });

  // ---- phase-diagram ---------------------------------------------------------
  auto* phase = app.add_subcommand("phase-diagram",
                                   "Evaluate a trained circuit over the plane");
  CommonOpts po;
  add_common(phase, po);
  GridSpec grid;
  std::string params_path, regions_path, phase_cache;
  int phase_workers = 1;
  from_config(cfg, "sites", grid.sites);
  phase->add_option("--sites", grid.sites, "Spin count");
  phase->add_option("--params-json", params_path, "Trained parameter file");
  phase->add_option("--h1", grid.h1_max, "Upper h1 bound");
  phase->add_option("--h1-steps", grid.h1_steps, "Grid points along h1");
  phase->add_option("--h2", grid.h2_max, "Upper |h2| bound");
  phase->add_option("--h2-steps", grid.h2_steps, "Grid points along h2");
  phase->add_option("--regions", regions_path, "Region mask CSV");
  phase->add_option("--cache", phase_cache, "Ground-state cache directory");
  phase->add_option("--workers", phase_workers, "Parallel eigensolves");
  phase->callback([&] {
    Motif m = po.expr.empty() && po.motif_json.empty()
                  ? reverse_binary_tree(grid.sites, 1, 0, FilterSpec{"right"})
                  : load_motif(po);
    CircuitProgram prog = compile(resolve(m), registry);
    Eigen::VectorXd params = Eigen::VectorXd::Zero(prog.param_count());
    if (!params_path.empty()) {
      std::ifstream in(params_path);
      if (!in) throw ConfigError("cannot open parameters: " + params_path);
      json j;
      in >> j;
      if (j.contains("parameters")) j = j.at("parameters");
      params = params_from_json(j);
      if (params.size() != prog.param_count())
        throw ConfigError("parameter file does not match the motif");
    }
    grid.h2_min = -grid.h2_max;
    std::vector<RegionTag> regions;
    if (!regions_path.empty()) regions = load_region_csv(regions_path);
    GroundStateCache cache(phase_cache);
    PhaseGrid result =
        phase_diagram(prog, params, grid, regions, &cache, phase_workers);
    const fs::path out = ensure_out(po);
    if (out.empty()) {
      std::ostringstream ss;
      ss << "h1,h2,expectation,region\n";
      for (const auto& p : result.points)
        ss << p.h1 << "," << p.h2 << "," << p.expectation << "," << p.region
           << "\n";
      std::cout << ss.str();
    } else {
      write_phase_csv(result, (out / "phase.csv").string());
    }
    persist_config(out, "phase-diagram",
                   json{{"sites", grid.sites},
                        {"h1_steps", grid.h1_steps},
                        {"h2_steps", grid.h2_steps},
                        {"seed", po.seed}});
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
