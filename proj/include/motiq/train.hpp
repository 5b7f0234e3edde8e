#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motiq/circuit.hpp"

namespace motiq {

struct Dataset {
  Eigen::MatrixXd features;  // rows = samples
  std::vector<int> labels;   // binary
  std::vector<int> train_idx;
  std::vector<int> test_idx;

  int size() const { return static_cast<int>(labels.size()); }
};

/// CSV with a header row; the label column is named `label`, every other
/// column is a feature. Labels must be 0/1 and features finite.
Dataset load_dataset_csv(const std::string& path);

/// Fill train_idx/test_idx with a seeded stratified split.
void stratified_split(Dataset& data, double train_fraction, uint64_t seed);

/// Column-wise min-max scaling into [lo, hi].
Eigen::MatrixXd minmax_scale(const Eigen::MatrixXd& x, double lo, double hi);

/// The scaling ceiling conventionally paired with each encoding:
/// amplitude 1, qubit pi/2, IQP pi (lower bound 0 in all cases).
double encoding_scale_max(Encoding e);

enum class Optimizer { GradientDescent, Adam };
enum class GradientMethod { ParameterShift, FiniteDifference };

struct TrainConfig {
  Optimizer optimizer = Optimizer::Adam;
  double learning_rate = 0.01;
  int epochs = 100;
  int batch_size = 0;  // 0 = full batch
  GradientMethod gradient = GradientMethod::ParameterShift;
  uint64_t seed = 0;
  int folds = 1;  // >= 2 holds out one fold for validation
  double fd_step = 1e-4;
};

/// Mean binary cross-entropy; predictions are clamped away from 0 and 1
/// before the logs.
double cross_entropy(const std::vector<int>& y, const Eigen::VectorXd& yhat);

/// Supplies the prepared input state for sample i.
using StateProvider = std::function<StateVector(int)>;

double predict_state(const CircuitProgram& prog, const Eigen::VectorXd& params,
                     const StateVector& input);

Eigen::VectorXd predict(const CircuitProgram& prog, const Eigen::VectorXd& params,
                        const StateProvider& states, const std::vector<int>& idx);

/// Gradient of the batch cross-entropy. The shift rule sums the two-term
/// contributions of every rotation site of a shared group; it refuses
/// programs containing matrix-exponential gates.
Eigen::VectorXd cost_gradient(const CircuitProgram& prog,
                              const Eigen::VectorXd& params,
                              const StateProvider& states,
                              const std::vector<int>& labels,
                              const std::vector<int>& idx, GradientMethod method,
                              double fd_step = 1e-4);

struct FitResult {
  Eigen::VectorXd params;
  std::vector<double> train_cost;  // entry 0 is the pre-training cost
  std::vector<double> val_cost;
  int best_epoch = 0;
};

/// Seeded training loop over prepared states. Returns the parameters of
/// the best validation epoch (training cost breaks ties, then epoch
/// order, with the initial parameters as a candidate).
FitResult fit_states(const CircuitProgram& prog, const StateProvider& states,
                     const std::vector<int>& labels,
                     const std::vector<int>& train_idx, const TrainConfig& cfg);

/// Encoding-based convenience wrapper over a tabular dataset; uses the
/// dataset's train split when present.
FitResult fit(const CircuitProgram& prog, const Dataset& data, Encoding enc,
              const TrainConfig& cfg);

struct EvalResult {
  double accuracy = 0;
  double mean_cost = 0;
};

/// Threshold at 0.5; a prediction of exactly 0.5 counts as class 1.
EvalResult evaluate_states(const CircuitProgram& prog, const Eigen::VectorXd& params,
                           const StateProvider& states,
                           const std::vector<int>& labels,
                           const std::vector<int>& idx);

EvalResult evaluate(const CircuitProgram& prog, const Eigen::VectorXd& params,
                    const Dataset& data, Encoding enc, bool on_test_split);

void write_history_csv(const std::string& path, const FitResult& result);

}  // namespace motiq
