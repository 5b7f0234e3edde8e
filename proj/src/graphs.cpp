#include "motiq/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace motiq {

using nlohmann::json;

std::vector<int> PrimitiveGraph::measured_qubits() const {
  std::unordered_set<int> controls;
  for (const auto& e : edges)
    for (int i = 0; i < num_controls && i < static_cast<int>(e.size()); ++i)
      controls.insert(e[i]);
  std::vector<int> out;
  for (int q : qubits)
    if (controls.count(q)) out.push_back(q);
  return out;
}

std::vector<int> PrimitiveGraph::surviving_qubits() const {
  if (kind != PrimitiveKind::Qpool) return qubits;
  std::unordered_set<int> controls;
  for (const auto& e : edges)
    for (int i = 0; i < num_controls && i < static_cast<int>(e.size()); ++i)
      controls.insert(e[i]);
  std::vector<int> out;
  for (int q : qubits)
    if (!controls.count(q)) out.push_back(q);
  return out;
}

std::string expand_filter(const FilterSpec& spec, int k) {
  if (k < 1) throw ConfigError("filter length must be positive");
  if (spec.is_literal()) {
    const std::string& w = spec.value;
    if (static_cast<int>(w.size()) > k)
      throw ConfigError("literal filter longer than the available qubit count");
    std::string out(k, '0');
    for (int i = 0; i < k; ++i) out[i] = w[i % w.size()];
    return out;
  }
  if (k < 2) throw ConfigError("named filters require at least two qubits");
  const std::string& name = spec.value;
  const int half = k / 2;  // measured count for right/left
  if (name == "right") return std::string(k - half, '0') + std::string(half, '1');
  if (name == "left") return std::string(half, '1') + std::string(k - half, '0');
  if (name == "odd" || name == "even") {
    const char* pat = name == "odd" ? "01" : "10";
    std::string out(k, '0');
    for (int i = 0; i < k; ++i) out[i] = pat[i % 2];
    return out;
  }
  if (name == "inside" || name == "outside") {
    const bool inside = name == "inside";
    if (k == 2) return inside ? "01" : "10";
    if (k % 4 != 0)
      throw ConfigError("filter '" + name + "' requires length 2 or a multiple of four, got " +
                        std::to_string(k));
    const char outer = inside ? '0' : '1';
    const char innerc = inside ? '1' : '0';
    return std::string(k / 4, outer) + std::string(k / 2, innerc) +
           std::string(k / 4, outer);
  }
  throw ConfigError("unknown pooling filter: " + name);
}

FilterSlice apply_filter(const std::string& mask, const std::vector<int>& qubits) {
  if (mask.size() != qubits.size())
    throw ConfigError("filter length " + std::to_string(mask.size()) +
                      " does not match qubit count " + std::to_string(qubits.size()));
  FilterSlice slice;
  for (size_t i = 0; i < qubits.size(); ++i) {
    if (mask[i] == '0')
      slice.kept.push_back(qubits[i]);
    else if (mask[i] == '1')
      slice.measured.push_back(qubits[i]);
    else
      throw ConfigError("filter mask may contain only 0 and 1");
  }
  return slice;
}

// Tuple construction shared by convolution and hypergraph pooling:
// start positions advance by `step` from `offset` across one pass of the
// list; members sit `stride` apart, wrapping for periodic boundaries.
static std::vector<std::vector<int>> tuple_edges(const std::vector<int>& qubits,
                                                 int arity, int stride, int step,
                                                 int offset, Boundary boundary) {
  const int k = static_cast<int>(qubits.size());
  std::vector<std::vector<int>> edges;
  int s = stride % k;
  if (s == 0 && arity > 1)
    throw ConfigError("stride congruent to 0 modulo the qubit count is rejected");
  for (int a = offset; a < k; a += step) {
    std::vector<int> tuple;
    tuple.reserve(arity);
    bool wraps = false;
    for (int j = 0; j < arity; ++j) {
      const long pos = static_cast<long>(a) + static_cast<long>(j) * s;
      if (pos >= k) wraps = true;
      tuple.push_back(qubits[pos % k]);
    }
    if (wraps && boundary == Boundary::Open) break;
    std::set<int> distinct(tuple.begin(), tuple.end());
    if (static_cast<int>(distinct.size()) != arity)
      throw ConfigError("stride " + std::to_string(stride) +
                        " collides tuple members on " + std::to_string(k) + " qubits");
    edges.push_back(std::move(tuple));
  }
  return edges;
}

std::vector<std::vector<int>> conv_edges(const std::vector<int>& qubits,
                                         const Hyperparams& h) {
  const int k = static_cast<int>(qubits.size());
  if (k < 1) throw ConfigError("convolution requires at least one available qubit");
  if (k == 1) return {{qubits[0], qubits[0]}};
  if (h.qpu > k)
    throw ConfigError("unitary arity " + std::to_string(h.qpu) + " exceeds " +
                      std::to_string(k) + " available qubits");
  if (h.qpu == 2 && k == 2) return {{qubits[0], qubits[1]}};
  return tuple_edges(qubits, h.qpu, h.stride, h.step, h.offset, h.boundary);
}

std::vector<std::vector<int>> dense_edges(const std::vector<int>& qubits) {
  const int k = static_cast<int>(qubits.size());
  if (k < 2) throw ConfigError("dense primitive requires at least two available qubits");
  std::vector<std::vector<int>> edges;
  edges.reserve(static_cast<size_t>(k) * (k - 1));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) edges.push_back({qubits[i], qubits[j]});
  return edges;
}

std::vector<std::vector<int>> pool_edges(const std::vector<int>& qubits,
                                         const std::string& mask, int stride) {
  FilterSlice slice = apply_filter(mask, qubits);
  if (slice.kept.empty()) throw ConfigError("pooling filter keeps no qubits");
  if (slice.measured.empty()) throw ConfigError("pooling filter measures no qubits");
  std::vector<std::vector<int>> edges;
  edges.reserve(slice.measured.size());
  const int kept = static_cast<int>(slice.kept.size());
  for (size_t a = 0; a < slice.measured.size(); ++a)
    edges.push_back({slice.measured[a],
                     slice.kept[(static_cast<int>(a) + stride) % kept]});
  return edges;
}

// Hypergraph pooling: tuples built as for convolutions, then each tuple
// is split by the expanded mask into controls (measured) and targets.
static std::vector<std::vector<int>> pool_tuple_edges(
    const std::vector<int>& qubits, const std::string& mask,
    const Hyperparams& h, int& num_controls) {
  std::unordered_set<int> measured;
  for (size_t i = 0; i < qubits.size(); ++i)
    if (mask[i] == '1') measured.insert(qubits[i]);
  auto tuples = tuple_edges(qubits, h.qpu, h.stride, h.step, h.offset, h.boundary);
  std::vector<std::vector<int>> edges;
  num_controls = -1;
  for (const auto& t : tuples) {
    std::vector<int> controls, targets;
    for (int q : t) (measured.count(q) ? controls : targets).push_back(q);
    if (controls.empty() || targets.empty())
      throw ConfigError("pooling tuple needs at least one measured and one kept qubit");
    if (num_controls < 0)
      num_controls = static_cast<int>(controls.size());
    else if (num_controls != static_cast<int>(controls.size()))
      throw ConfigError("pooling filter yields uneven control counts across tuples");
    controls.insert(controls.end(), targets.begin(), targets.end());
    edges.push_back(std::move(controls));
  }
  if (edges.empty()) throw ConfigError("pooling primitive produced no edges");
  return edges;
}

static void apply_edge_order(PrimitiveGraph& g, const std::vector<int>& order) {
  const size_t n = g.edges.size();
  if (order.size() != n)
    throw ConfigError("edge_order length does not match edge count");
  std::vector<bool> seen(n, false);
  std::vector<std::vector<int>> reordered;
  reordered.reserve(n);
  for (int idx : order) {
    if (idx < 1 || idx > static_cast<int>(n) || seen[idx - 1])
      throw ConfigError("edge_order must be a permutation of 1..|E|");
    seen[idx - 1] = true;
    reordered.push_back(g.edges[idx - 1]);
  }
  g.edges = std::move(reordered);
}

std::vector<PrimitiveGraph> resolve(const PrimitiveSequence& seq) {
  if (seq.empty()) throw ConfigError("cannot resolve an empty primitive sequence");
  if (seq.front().kind != PrimitiveKind::Qfree)
    throw ConfigError("a primitive sequence must start with Qfree");

  std::vector<PrimitiveGraph> graphs;
  graphs.reserve(seq.size());
  std::vector<int> avail;

  for (size_t m = 0; m < seq.size(); ++m) {
    const Primitive& p = seq[m];
    PrimitiveGraph g;
    g.kind = p.kind;
    g.mapping = p.params.mapping;

    if (p.kind == PrimitiveKind::Qfree) {
      std::vector<int> labels;
      if (p.params.free_labels) {
        for (int ext : *p.params.free_labels) {
          if (ext < 1) throw ConfigError("qubit labels are 1-based and positive");
          labels.push_back(ext - 1);
        }
        std::set<int> uniq(labels.begin(), labels.end());
        if (uniq.size() != labels.size())
          throw ConfigError("Qfree labels must be distinct");
      } else {
        labels.resize(p.params.free_count);
        std::iota(labels.begin(), labels.end(), 0);
      }
      g.qubits = labels;
      avail = std::move(labels);
      graphs.push_back(std::move(g));
      continue;
    }

    if (avail.empty())
      throw ConfigError("no available qubits for " + to_string(p.kind) +
                        " at position " + std::to_string(m + 1));
    g.qubits = avail;

    switch (p.kind) {
      case PrimitiveKind::Qconv:
        g.edges = conv_edges(avail, p.params);
        break;
      case PrimitiveKind::Qdense:
        g.edges = dense_edges(avail);
        break;
      case PrimitiveKind::Qpool: {
        if (avail.size() < 2)
          throw ConfigError("pooling requires at least two available qubits");
        const std::string mask =
            expand_filter(p.params.filter, static_cast<int>(avail.size()));
        if (p.params.qpu > 2) {
          g.edges = pool_tuple_edges(avail, mask, p.params, g.num_controls);
        } else {
          g.edges = pool_edges(avail, mask, p.params.stride);
          g.num_controls = 1;
        }
        break;
      }
      default:
        break;
    }

    if (p.params.edge_order) apply_edge_order(g, *p.params.edge_order);
    avail = g.surviving_qubits();
    graphs.push_back(std::move(g));
  }
  return graphs;
}

std::vector<PrimitiveGraph> resolve(const Motif& m) { return resolve(m.flatten()); }

UnitaryCounts count_unitaries(const std::vector<PrimitiveGraph>& graphs) {
  UnitaryCounts counts;
  for (const auto& g : graphs) {
    if (g.kind == PrimitiveKind::Qconv || g.kind == PrimitiveKind::Qdense)
      counts.convolution += static_cast<int>(g.edges.size());
    else if (g.kind == PrimitiveKind::Qpool)
      counts.pooling += static_cast<int>(g.edges.size());
  }
  return counts;
}

Motif reverse_binary_tree(int qubits, int conv_stride, int pool_stride,
                          FilterSpec filter, const std::string& conv_mapping,
                          const std::string& pool_mapping) {
  if (qubits < 2) throw ConfigError("a tree needs at least two qubits");
  int reps = 0;
  for (int n = qubits; n > 1; n = (n + 1) / 2) ++reps;
  Hyperparams conv;
  conv.stride = conv_stride;
  conv.mapping = conv_mapping;
  Hyperparams pool;
  pool.stride = pool_stride;
  pool.filter = std::move(filter);
  pool.mapping = pool_mapping;
  return qfree(qubits) + (qconv(conv) + qpool(pool)) * reps;
}

std::string to_dot(const std::vector<PrimitiveGraph>& graphs) {
  std::ostringstream out;
  out << "digraph architecture {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle];\n";
  for (size_t m = 0; m < graphs.size(); ++m) {
    const PrimitiveGraph& g = graphs[m];
    const std::vector<int> measured = g.measured_qubits();
    std::unordered_set<int> measured_set(measured.begin(), measured.end());
    out << "  subgraph cluster_g" << m + 1 << " {\n";
    out << "    label=\"G" << m + 1 << " " << to_string(g.kind) << "\";\n";
    for (int q : g.qubits) {
      out << "    g" << m + 1 << "_q" << q + 1 << " [label=\"" << q + 1 << "\"";
      if (measured_set.count(q)) out << ", style=filled, fillcolor=lightcoral";
      out << "];\n";
    }
    const char* tag = g.kind == PrimitiveKind::Qpool ? "V" : "U";
    for (const auto& e : g.edges) {
      if (e.size() == 1 || (e.size() == 2 && e[0] == e[1])) {
        // single-qubit unitary; the node alone carries it
        continue;
      }
      if (g.kind == PrimitiveKind::Qpool && g.num_controls >= 1) {
        for (int c = 0; c < g.num_controls; ++c)
          for (size_t t = g.num_controls; t < e.size(); ++t)
            out << "    g" << m + 1 << "_q" << e[c] + 1 << " -> g" << m + 1
                << "_q" << e[t] + 1 << " [label=\"" << tag << m + 1 << "\"];\n";
      } else {
        for (size_t i = 0; i + 1 < e.size(); ++i)
          out << "    g" << m + 1 << "_q" << e[i] + 1 << " -> g" << m + 1
              << "_q" << e[i + 1] + 1 << " [label=\"" << tag << m + 1 << "\"];\n";
      }
    }
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

json graphs_to_json(const std::vector<PrimitiveGraph>& graphs) {
  json arr = json::array();
  for (const auto& g : graphs) {
    json jg;
    jg["kind"] = to_string(g.kind);
    json qs = json::array();
    for (int q : g.qubits) qs.push_back(q + 1);
    jg["qubits"] = std::move(qs);
    json es = json::array();
    for (const auto& e : g.edges) {
      json je = json::array();
      for (int q : e) je.push_back(q + 1);
      es.push_back(std::move(je));
    }
    jg["edges"] = std::move(es);
    if (g.operational()) jg["mapping"] = g.mapping;
    if (g.kind == PrimitiveKind::Qpool) {
      json ms = json::array();
      for (int q : g.measured_qubits()) ms.push_back(q + 1);
      jg["measured"] = std::move(ms);
      jg["controls_per_edge"] = g.num_controls;
    }
    arr.push_back(std::move(jg));
  }
  return arr;
}

}  // namespace motiq
