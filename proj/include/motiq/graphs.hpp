#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "motiq/motif.hpp"

namespace motiq {

/// One flattened primitive as a concrete (hyper)graph. Qubit labels are
/// 0-based internally; every serialized or printed form uses 1-based
/// labels. Edges are n-tuples; for pooling the first `num_controls`
/// members of each tuple are the measured (control) qubits.
struct PrimitiveGraph {
  PrimitiveKind kind = PrimitiveKind::Qfree;
  std::vector<int> qubits;                // available set Q_m, ordered
  std::vector<std::vector<int>> edges;    // ordered edge tuples
  std::string mapping;
  bool shared_weights = true;
  int num_controls = 0;                   // controls per edge (pooling)

  bool operational() const { return kind != PrimitiveKind::Qfree; }
  /// Union of the control members of all edges, in qubit order.
  std::vector<int> measured_qubits() const;
  /// Available set left for the successor primitive.
  std::vector<int> surviving_qubits() const;
};

/// Expand a named filter family or literal pattern to a 0/1 string of
/// length k. Literals shorter than k are tiled cyclically. Named
/// families follow the half-measuring patterns; inside/outside accept
/// only k == 2 or k divisible by four.
std::string expand_filter(const FilterSpec& spec, int k);

/// Slice an ordered qubit list by a 0/1 mask of equal length:
/// 0-positions are kept, 1-positions are measured. Order preserving.
struct FilterSlice {
  std::vector<int> kept;
  std::vector<int> measured;
};
FilterSlice apply_filter(const std::string& mask, const std::vector<int>& qubits);

/// Convolution edges over the ordered available list. Positions are
/// paired (i, i+stride, i+2*stride, ...) modulo the list length for the
/// periodic boundary; open boundaries stop at the first tuple that
/// would wrap. One available qubit yields the self-loop (single-qubit
/// unitaries); two yield the single pair.
std::vector<std::vector<int>> conv_edges(const std::vector<int>& qubits,
                                         const Hyperparams& h);

/// All ordered pairs (i, j), i != j, lexicographic by position.
std::vector<std::vector<int>> dense_edges(const std::vector<int>& qubits);

/// Pooling edges: measured and kept qubits are each ordered by position
/// and the a-th measured control targets kept position
/// (a + stride) mod |kept|.
std::vector<std::vector<int>> pool_edges(const std::vector<int>& qubits,
                                         const std::string& mask, int stride);

/// Resolve a flattened primitive sequence into its graph list. The
/// sequence must start with Qfree; each later primitive derives its
/// available set from its predecessor.
std::vector<PrimitiveGraph> resolve(const PrimitiveSequence& seq);
std::vector<PrimitiveGraph> resolve(const Motif& m);

/// Per-model unitary tally. The total counts the state-preparation
/// unitary and the terminal measurement alongside the per-edge blocks,
/// matching how model sizes are quoted for this architecture family.
struct UnitaryCounts {
  int convolution = 0;
  int pooling = 0;
  int encoding = 1;
  int measurement = 1;
  int total() const { return convolution + pooling + encoding + measurement; }
};
UnitaryCounts count_unitaries(const std::vector<PrimitiveGraph>& graphs);

/// Reverse-binary-tree builder: Qfree(N) followed by ceil(log2 N)
/// convolution+pooling units. The filter must keep the upper half each
/// round for the tree to terminate on one qubit.
Motif reverse_binary_tree(int qubits, int conv_stride, int pool_stride,
                          FilterSpec filter,
                          const std::string& conv_mapping = "u_ttn",
                          const std::string& pool_mapping = "v_pool");

/// DOT rendering, one cluster per graph; measured qubits are drawn
/// filled, edges labelled U_m / V_m by layer.
std::string to_dot(const std::vector<PrimitiveGraph>& graphs);

nlohmann::json graphs_to_json(const std::vector<PrimitiveGraph>& graphs);

}  // namespace motiq
