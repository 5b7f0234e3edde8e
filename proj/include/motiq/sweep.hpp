#pragma once

#include <string>
#include <vector>

#include "motiq/train.hpp"

namespace motiq {

/// Cartesian family of reverse-binary-tree architectures. Enumeration
/// order is deterministic lexicographic: ansatz, filter, pooling stride,
/// convolution stride.
struct SweepSpec {
  int qubits = 8;
  std::vector<int> conv_strides = {1, 2, 3, 4, 5, 6, 7};
  std::vector<int> pool_strides = {0, 1, 2, 3};
  std::vector<std::string> filters = {"even", "inside", "left",
                                      "odd",  "outside", "right"};
  std::vector<std::string> ansatzes = {"u_ttn"};
  std::string pool_mapping = "v_pool";
};

struct SweepCell {
  std::string ansatz;
  std::string filter;
  int pool_stride = 0;
  int conv_stride = 1;
  Motif motif;
};

std::vector<SweepCell> enumerate_sweep(const SweepSpec& spec);

struct SweepOptions {
  TrainConfig train;
  Encoding encoding = Encoding::Qubit;
  int seeds = 1;
  int workers = 1;
};

struct SweepCellResult {
  SweepCell cell;
  bool failed = false;
  std::string error;
  double mean_accuracy = 0;
  double std_accuracy = 0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCellResult> cells;
};

/// Train every architecture in the family over `seeds` runs and collect
/// held-out accuracies. A failing cell is marked and the sweep carries
/// on.
SweepResult run_sweep(const SweepSpec& spec, const Dataset& data,
                      const Registry& registry, const SweepOptions& options);

/// Matrix layout: one row per (filter, pooling stride), one column per
/// convolution stride, cells are mean accuracies. One file per ansatz
/// suffix when several ansatzes are swept.
void write_sweep_matrix_csv(const SweepResult& result, const std::string& path);

/// Long form: one row per architecture with mean and standard deviation.
void write_sweep_long_csv(const SweepResult& result, const std::string& path);

}  // namespace motiq
