#include "motiq/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace motiq {

namespace {

constexpr double kClamp = 1e-10;

double clamp_prob(double p) {
  return std::min(1.0 - kClamp, std::max(kClamp, p));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    size_t b = cell.find_first_not_of(' ');
    cells.push_back(b == std::string::npos ? "" : cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty dataset: " + path);
  const auto header = split_csv_line(line);
  int label_col = -1;
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == "label") label_col = static_cast<int>(i);
  if (label_col < 0) throw ConfigError("dataset has no `label` column: " + path);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ConfigError("ragged CSV row in " + path);
    std::vector<double> row;
    for (size_t i = 0; i < cells.size(); ++i) {
      double v;
      try {
        v = std::stod(cells[i]);
      } catch (const std::exception&) {
        throw ConfigError("non-numeric cell '" + cells[i] + "' in " + path);
      }
      if (!std::isfinite(v)) throw ConfigError("non-finite feature in " + path);
      if (static_cast<int>(i) == label_col) {
        if (v != 0.0 && v != 1.0) throw ConfigError("labels must be 0 or 1");
        labels.push_back(static_cast<int>(v));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  Dataset data;
  data.labels = std::move(labels);
  data.features.resize(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) data.features(i, j) = rows[i][j];
  return data;
}

void stratified_split(Dataset& data, double train_fraction, uint64_t seed) {
  if (train_fraction <= 0 || train_fraction >= 1)
    throw ConfigError("train fraction must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  data.train_idx.clear();
  data.test_idx.clear();
  for (int cls : {0, 1}) {
    std::vector<int> idx;
    for (int i = 0; i < data.size(); ++i)
      if (data.labels[i] == cls) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    const size_t n_train = static_cast<size_t>(std::lround(train_fraction * idx.size()));
    for (size_t i = 0; i < idx.size(); ++i)
      (i < n_train ? data.train_idx : data.test_idx).push_back(idx[i]);
  }
  std::sort(data.train_idx.begin(), data.train_idx.end());
  std::sort(data.test_idx.begin(), data.test_idx.end());
}

Eigen::MatrixXd minmax_scale(const Eigen::MatrixXd& x, double lo, double hi) {
  Eigen::MatrixXd out = x;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mn = x.col(c).minCoeff();
    const double mx = x.col(c).maxCoeff();
    if (mx == mn) {
      out.col(c).setConstant(lo);
    } else {
      out.col(c) = ((x.col(c).array() - mn) / (mx - mn)) * (hi - lo) + lo;
    }
  }
  return out;
}

double encoding_scale_max(Encoding e) {
  switch (e) {
    case Encoding::Amplitude: return 1.0;
    case Encoding::Qubit: return M_PI / 2;
    case Encoding::Iqp: return M_PI;
  }
  return 1.0;
}

double cross_entropy(const std::vector<int>& y, const Eigen::VectorXd& yhat) {
  if (static_cast<Eigen::Index>(y.size()) != yhat.size())
    throw ConfigError("label / prediction length mismatch");
  if (y.empty()) throw ConfigError("cross entropy of an empty batch");
  double total = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double p = clamp_prob(yhat[i]);
    total += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / y.size();
}

double predict_state(const CircuitProgram& prog, const Eigen::VectorXd& params,
                     const StateVector& input) {
  return readout_probability(run(prog, params, input), prog.readout);
}

Eigen::VectorXd predict(const CircuitProgram& prog, const Eigen::VectorXd& params,
                        const StateProvider& states, const std::vector<int>& idx) {
  Eigen::VectorXd yhat(idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    yhat[i] = predict_state(prog, params, states(idx[i]));
  return yhat;
}

namespace {

double batch_cost(const CircuitProgram& prog, const Eigen::VectorXd& params,
                  const StateProvider& states, const std::vector<int>& labels,
                  const std::vector<int>& idx) {
  std::vector<int> y;
  y.reserve(idx.size());
  for (int i : idx) y.push_back(labels[i]);
  return cross_entropy(y, predict(prog, params, states, idx));
}

}  // namespace

Eigen::VectorXd cost_gradient(const CircuitProgram& prog,
                              const Eigen::VectorXd& params,
                              const StateProvider& states,
                              const std::vector<int>& labels,
                              const std::vector<int>& idx, GradientMethod method,
                              double fd_step) {
  const int np = prog.param_count();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
  if (np == 0 || idx.empty()) return grad;

  if (method == GradientMethod::FiniteDifference) {
    Eigen::VectorXd probe = params;
    for (int p = 0; p < np; ++p) {
      probe[p] = params[p] + fd_step;
      const double up = batch_cost(prog, probe, states, labels, idx);
      probe[p] = params[p] - fd_step;
      const double dn = batch_cost(prog, probe, states, labels, idx);
      probe[p] = params[p];
      grad[p] = (up - dn) / (2 * fd_step);
    }
    return grad;
  }

  if (!prog.shift_rule_applies())
    throw ConfigError(
        "parameter-shift gradients need rotation-generated gates; use finite "
        "differences for matrix-exponential mappings");

  const double inv_batch = 1.0 / idx.size();
  for (int i : idx) {
    const StateVector input = states(i);
    const double p = clamp_prob(predict_state(prog, params, input));
    const double w =
        (labels[i] == 1 ? -1.0 / p : 1.0 / (1.0 - p)) * inv_batch;
    for (size_t s = 0; s < prog.sites.size(); ++s) {
      const GateSite& site = prog.sites[s];
      if (site.kind != SiteKind::Rotation) continue;
      const double up = readout_probability(
          run_shifted(prog, params, input, s, M_PI / 2), prog.readout);
      const double dn = readout_probability(
          run_shifted(prog, params, input, s, -M_PI / 2), prog.readout);
      const int param = prog.groups[site.group].offset + site.local;
      grad[param] += w * site.coeff * (up - dn) / 2.0;
    }
  }
  return grad;
}

FitResult fit_states(const CircuitProgram& prog, const StateProvider& states,
                     const std::vector<int>& labels,
                     const std::vector<int>& train_idx, const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0) throw ConfigError("learning rate must be positive");
  if (cfg.folds < 1) throw ConfigError("fold count must be at least 1");
  if (train_idx.empty()) throw ConfigError("empty training set");
  std::mt19937_64 rng(cfg.seed);

  const int np = prog.param_count();
  Eigen::VectorXd params(np);
  std::uniform_real_distribution<double> init(0.0, 2 * M_PI);
  for (int p = 0; p < np; ++p) params[p] = init(rng);

  // Optional held-out fold for validation.
  std::vector<int> fit_idx, val_idx;
  if (cfg.folds >= 2) {
    std::vector<int> by_class[2];
    for (int i : train_idx) by_class[labels[i] == 1].push_back(i);
    for (auto& cls : by_class) {
      std::shuffle(cls.begin(), cls.end(), rng);
      for (size_t i = 0; i < cls.size(); ++i)
        (i % cfg.folds == 0 ? val_idx : fit_idx).push_back(cls[i]);
    }
    std::sort(fit_idx.begin(), fit_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    if (fit_idx.empty() || val_idx.empty())
      throw ConfigError("too few samples for the requested fold count");
  } else {
    fit_idx = train_idx;
  }
  const std::vector<int>& score_idx = val_idx.empty() ? fit_idx : val_idx;

  FitResult result;
  result.params = params;
  Eigen::VectorXd best = params;
  double best_val = std::numeric_limits<double>::infinity();
  double best_train = std::numeric_limits<double>::infinity();

  Eigen::VectorXd m = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(np);
  long step = 0;

  auto record = [&](int epoch) {
    if (!params.allFinite())
      throw NumericError("parameters diverged at epoch " + std::to_string(epoch));
    const double tc = batch_cost(prog, params, states, labels, fit_idx);
    const double vc = val_idx.empty()
                          ? tc
                          : batch_cost(prog, params, states, labels, score_idx);
    if (!std::isfinite(tc) || !std::isfinite(vc))
      throw NumericError("non-finite training cost at epoch " +
                         std::to_string(epoch));
    result.train_cost.push_back(tc);
    result.val_cost.push_back(vc);
    if (vc < best_val || (vc == best_val && tc < best_train)) {
      best_val = vc;
      best_train = tc;
      best = params;
      result.best_epoch = epoch;
    }
  };

  record(0);

  std::vector<int> order = fit_idx;
  const int batch = cfg.batch_size > 0
                        ? std::min<int>(cfg.batch_size, order.size())
                        : static_cast<int>(order.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t stop = std::min(order.size(), start + batch);
      std::vector<int> chunk(order.begin() + start, order.begin() + stop);
      Eigen::VectorXd grad =
          cost_gradient(prog, params, states, labels, chunk, cfg.gradient,
                        cfg.fd_step);
      if (cfg.optimizer == Optimizer::GradientDescent) {
        params -= cfg.learning_rate * grad;
      } else {
        ++step;
        m = 0.9 * m + 0.1 * grad;
        v = 0.999 * v + 0.001 * grad.cwiseProduct(grad).eval();
        const double mc = 1.0 - std::pow(0.9, step);
        const double vc = 1.0 - std::pow(0.999, step);
        params -= cfg.learning_rate *
                  ((m / mc).array() / ((v / vc).array().sqrt() + 1e-8)).matrix();
      }
    }
    record(epoch);
  }

  result.params = best;
  return result;
}

FitResult fit(const CircuitProgram& prog, const Dataset& data, Encoding enc,
              const TrainConfig& cfg) {
  const std::vector<int>* idx = &data.train_idx;
  std::vector<int> all;
  if (data.train_idx.empty()) {
    all.resize(data.size());
    std::iota(all.begin(), all.end(), 0);
    idx = &all;
  }
  auto states = [&data, enc, &prog](int i) {
    return encode(data.features.row(i), enc, prog.num_qubits);
  };
  return fit_states(prog, states, data.labels, *idx, cfg);
}

EvalResult evaluate_states(const CircuitProgram& prog, const Eigen::VectorXd& params,
                           const StateProvider& states,
                           const std::vector<int>& labels,
                           const std::vector<int>& idx) {
  if (idx.empty()) throw ConfigError("empty evaluation set");
  Eigen::VectorXd yhat = predict(prog, params, states, idx);
  std::vector<int> y;
  y.reserve(idx.size());
  int correct = 0;
  for (size_t i = 0; i < idx.size(); ++i) {
    y.push_back(labels[idx[i]]);
    const int pred = yhat[i] >= 0.5 ? 1 : 0;
    if (pred == y.back()) ++correct;
  }
  EvalResult r;
  r.accuracy = static_cast<double>(correct) / idx.size();
  r.mean_cost = cross_entropy(y, yhat);
  return r;
}

EvalResult evaluate(const CircuitProgram& prog, const Eigen::VectorXd& params,
                    const Dataset& data, Encoding enc, bool on_test_split) {
  std::vector<int> idx = on_test_split ? data.test_idx : data.train_idx;
  if (idx.empty()) {
    idx.resize(data.size());
    std::iota(idx.begin(), idx.end(), 0);
  }
  auto states = [&data, enc, &prog](int i) {
    return encode(data.features.row(i), enc, prog.num_qubits);
  };
  return evaluate_states(prog, params, states, data.labels, idx);
}

void write_history_csv(const std::string& path, const FitResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write history: " + path);
  out << "epoch,train_cost,val_cost\n";
  out.precision(17);
  for (size_t e = 0; e < result.train_cost.size(); ++e)
    out << e << "," << result.train_cost[e] << "," << result.val_cost[e] << "\n";
}

}  // namespace motiq
