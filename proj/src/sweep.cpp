#include "motiq/sweep.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "motiq/graphs.hpp"

namespace motiq {

std::vector<SweepCell> enumerate_sweep(const SweepSpec& spec) {
  if (spec.conv_strides.empty() || spec.pool_strides.empty() ||
      spec.filters.empty() || spec.ansatzes.empty())
    throw ConfigError("sweep space has an empty axis");
  std::vector<SweepCell> cells;
  cells.reserve(spec.ansatzes.size() * spec.filters.size() *
                spec.pool_strides.size() * spec.conv_strides.size());
  for (const auto& ansatz : spec.ansatzes)
    for (const auto& filter : spec.filters)
      for (int sp : spec.pool_strides)
        for (int sc : spec.conv_strides) {
          SweepCell cell;
          cell.ansatz = ansatz;
          cell.filter = filter;
          cell.pool_stride = sp;
          cell.conv_stride = sc;
          cell.motif = reverse_binary_tree(spec.qubits, sc, sp, FilterSpec{filter},
                                           ansatz, spec.pool_mapping);
          cells.push_back(std::move(cell));
        }
  return cells;
}

SweepResult run_sweep(const SweepSpec& spec, const Dataset& data,
                      const Registry& registry, const SweepOptions& options) {
  SweepResult result;
  result.spec = spec;
  const auto cells = enumerate_sweep(spec);
  result.cells.resize(cells.size());

  auto run_cell = [&](size_t i) {
    SweepCellResult out;
    out.cell = cells[i];
    try {
      const CircuitProgram prog = compile(resolve(cells[i].motif), registry);
      std::vector<double> accs;
      for (int s = 0; s < options.seeds; ++s) {
        TrainConfig cfg = options.train;
        cfg.seed = options.train.seed + static_cast<uint64_t>(s);
        const FitResult fitted = fit(prog, data, options.encoding, cfg);
        const EvalResult ev =
            evaluate(prog, fitted.params, data, options.encoding,
                     !data.test_idx.empty());
        accs.push_back(ev.accuracy);
      }
      double mean = 0;
      for (double a : accs) mean += a;
      mean /= accs.size();
      double var = 0;
      for (double a : accs) var += (a - mean) * (a - mean);
      out.mean_accuracy = mean;
      out.std_accuracy = accs.size() > 1 ? std::sqrt(var / accs.size()) : 0.0;
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
    }
    result.cells[i] = std::move(out);
  };

  const int workers =
      std::max(1, std::min<int>(options.workers, static_cast<int>(cells.size())));
  if (workers == 1) {
    for (size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    for (auto& t : pool) t.join();
  }
  return result;
}

void write_sweep_matrix_csv(const SweepResult& result, const std::string& path) {
  for (const auto& ansatz : result.spec.ansatzes) {
    std::string file = path;
    if (result.spec.ansatzes.size() > 1) {
      const size_t dot = path.rfind('.');
      file = dot == std::string::npos
                 ? path + "_" + ansatz
                 : path.substr(0, dot) + "_" + ansatz + path.substr(dot);
    }
    std::ofstream out(file);
    if (!out) throw ConfigError("cannot write sweep matrix: " + file);
    out << "filter,s_p";
    for (int sc : result.spec.conv_strides) out << ",sc_" << sc;
    out << "\n";
    out.precision(10);
    for (const auto& filter : result.spec.filters)
      for (int sp : result.spec.pool_strides) {
        out << filter << "," << sp;
        for (int sc : result.spec.conv_strides) {
          const SweepCellResult* found = nullptr;
          for (const auto& c : result.cells)
            if (c.cell.ansatz == ansatz && c.cell.filter == filter &&
                c.cell.pool_stride == sp && c.cell.conv_stride == sc)
              found = &c;
          out << ",";
          if (!found)
            out << "missing";
          else if (found->failed)
            out << "failed";
          else
            out << found->mean_accuracy;
        }
        out << "\n";
      }
  }
}

void write_sweep_long_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write sweep results: " + path);
  out << "ansatz,filter,s_p,s_c,mean_accuracy,std_accuracy,status\n";
  out.precision(10);
  for (const auto& c : result.cells) {
    out << c.cell.ansatz << "," << c.cell.filter << "," << c.cell.pool_stride
        << "," << c.cell.conv_stride << ",";
    if (c.failed)
      out << ",," << "failed";
    else
      out << c.mean_accuracy << "," << c.std_accuracy << ",ok";
    out << "\n";
  }
}

}  // namespace motiq
