#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "motiq/errors.hpp"

namespace motiq {

enum class PrimitiveKind { Qfree, Qconv, Qpool, Qdense };

enum class Boundary { Periodic, Open };

std::string to_string(PrimitiveKind k);
PrimitiveKind kind_from_string(const std::string& s);

/// Pooling mask: either one of the six named families or a literal 0/1
/// pattern. Literals shorter than the qubit count are tiled cyclically
/// when expanded.
struct FilterSpec {
  std::string value = "right";

  bool is_literal() const;
  static const std::array<std::string, 6>& families();
  bool operator==(const FilterSpec&) const = default;
};

/// Hyperparameters carried by a primitive. Which fields are meaningful
/// depends on the kind: Qfree uses only free_count/free_labels, Qpool
/// uses stride + filter, Qconv uses stride/step/offset/qpu/boundary and
/// Qdense everything of Qconv except stride.
struct Hyperparams {
  int stride = 1;
  int step = 1;
  int offset = 0;
  int qpu = 2;
  Boundary boundary = Boundary::Periodic;
  std::optional<std::vector<int>> edge_order;  // 1-based permutation of edges
  FilterSpec filter;
  int free_count = 0;
  std::optional<std::vector<int>> free_labels;  // 1-based explicit labels
  std::string mapping;

  bool operator==(const Hyperparams&) const = default;
};

struct Primitive {
  PrimitiveKind kind;
  Hyperparams params;

  bool operator==(const Primitive&) const = default;
};

using PrimitiveSequence = std::vector<Primitive>;

/// An immutable design motif: a primitive at level 1 or an ordered tuple
/// of sub-motifs above it. Composition never mutates; nodes are shared.
class Motif {
 public:
  Motif() = default;

  static Motif make_primitive(PrimitiveKind kind, Hyperparams params);
  static Motif make_composite(std::vector<Motif> children);

  bool valid() const { return node_ != nullptr; }
  bool is_primitive() const;
  PrimitiveKind kind() const;           // primitive only
  const Hyperparams& params() const;    // primitive only
  const std::vector<Motif>& children() const;  // composite only
  int level() const;

  /// Depth-first left-to-right collection of primitives.
  PrimitiveSequence flatten() const;

  /// Structural equality: same shape, same primitives.
  bool operator==(const Motif& other) const;

  nlohmann::json to_json() const;
  static Motif from_json(const nlohmann::json& j);

 private:
  struct Node;
  explicit Motif(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// append(a, b): the two-child tuple (a, b). Flattening order is
/// flatten(a) followed by flatten(b).
Motif append(const Motif& a, const Motif& b);

/// repeat(m, k): the k-child tuple (m, m, ..., m). Rejects k < 1.
Motif repeat(const Motif& m, int k);

inline Motif operator+(const Motif& a, const Motif& b) { return append(a, b); }
inline Motif operator*(const Motif& m, int k) { return repeat(m, k); }

// Primitive factories with the default hyperparameters.
Motif qfree(int n);
Motif qfree(std::vector<int> labels);
Motif qconv(int stride = 1, int step = 1, int offset = 0);
Motif qconv(Hyperparams h);
Motif qpool(int stride, FilterSpec filter);
Motif qpool(Hyperparams h);
Motif qdense();
Motif qdense(Hyperparams h);

/// Default unitary mapping names assigned when a primitive is created
/// without an explicit one.
std::string default_mapping(PrimitiveKind kind);

}  // namespace motiq
