#pragma once

// Shared helpers for the test suites: independent oracles (dense gate
// embedding, degree checks, a small DOT syntax checker) and random
// generators. Everything here recomputes results from first principles
// rather than calling back into the code paths under test.

#include <algorithm>
#include <complex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motiq/circuit.hpp"
#include "motiq/motif.hpp"

namespace motiq::test {

// --- random motifs -------------------------------------------------------

inline Motif random_primitive(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dk(0, 3);
  std::uniform_int_distribution<int> ds(0, 7);
  switch (dk(rng)) {
    case 0: return qfree(1 + ds(rng));
    case 1: {
      Hyperparams h;
      h.stride = 1 + ds(rng) % 7;
      h.step = 1 + ds(rng) % 3;
      h.offset = ds(rng) % 3;
      return qconv(h);
    }
    case 2: {
      const auto& fam = FilterSpec::families();
      Hyperparams h;
      h.stride = ds(rng) % 4;
      h.filter.value = fam[ds(rng) % fam.size()];
      return qpool(h);
    }
    default: return qdense();
  }
}

inline Motif random_motif(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> dn(2, 3);
  std::uniform_int_distribution<int> dleaf(0, 2);
  if (depth <= 1 || dleaf(rng) == 0) return random_primitive(rng);
  std::vector<Motif> children;
  const int n = dn(rng);
  for (int i = 0; i < n; ++i) children.push_back(random_motif(rng, depth - 1));
  return Motif::make_composite(std::move(children));
}

/// Motifs expressible in the inline grammar: built only from the
/// grammar's factories, binary appends and repeats.
inline Motif random_grammar_motif(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> dk(0, 3);
  std::uniform_int_distribution<int> ds(0, 6);
  std::uniform_int_distribution<int> dop(0, 2);
  if (depth <= 1) {
    switch (dk(rng)) {
      case 0: return qfree(1 + ds(rng));
      case 1: {
        const int variant = dop(rng);
        if (variant == 0) return qconv(1 + ds(rng));
        if (variant == 1) return qconv(1 + ds(rng), 1 + ds(rng) % 3);
        return qconv(1 + ds(rng), 1 + ds(rng) % 3, ds(rng) % 3);
      }
      case 2: {
        const auto& fam = FilterSpec::families();
        return qpool(ds(rng) % 4, FilterSpec{fam[ds(rng) % fam.size()]});
      }
      default: return qdense();
    }
  }
  if (dop(rng) == 0)
    return random_grammar_motif(rng, depth - 1) * (2 + ds(rng) % 3);
  return random_grammar_motif(rng, depth - 1) +
         random_grammar_motif(rng, depth - 1);
}

// --- dense simulator oracle ------------------------------------------------

/// Embed a local unitary into the full 2^n space by explicit basis-state
/// bookkeeping; qubits[0] carries the most significant local bit and the
/// gate acts only where every control bit is set.
inline Eigen::MatrixXcd embed_gate(const Eigen::MatrixXcd& u,
                                   const std::vector<int>& qubits,
                                   const std::vector<int>& controls, int n) {
  const long long dim = 1LL << n;
  const int k = static_cast<int>(qubits.size());
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (long long j = 0; j < dim; ++j) {
    bool active = true;
    for (int c : controls)
      if (!((j >> c) & 1)) active = false;
    if (!active) {
      full(j, j) = 1.0;
      continue;
    }
    int local = 0;
    for (int b = 0; b < k; ++b)
      local = (local << 1) | static_cast<int>((j >> qubits[b]) & 1);
    for (int lp = 0; lp < (1 << k); ++lp) {
      long long jp = j;
      for (int b = 0; b < k; ++b) {
        const long long mask = 1LL << qubits[b];
        if ((lp >> (k - 1 - b)) & 1)
          jp |= mask;
        else
          jp &= ~mask;
      }
      full(jp, j) += u(lp, local);
    }
  }
  return full;
}

/// Rotation matrices recomputed from the textbook formulas.
inline Eigen::Matrix2cd oracle_rotation(RotationAxis axis, double t) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  switch (axis) {
    case RotationAxis::X: m << C(c, 0), C(0, -s), C(0, -s), C(c, 0); break;
    case RotationAxis::Y: m << C(c, 0), C(-s, 0), C(s, 0), C(c, 0); break;
    case RotationAxis::Z:
      m << std::exp(C(0, -t / 2)), C(0, 0), C(0, 0), std::exp(C(0, t / 2));
      break;
  }
  return m;
}

/// Full-matrix product oracle for a compiled program (rotation and fixed
/// sites only).
inline Eigen::MatrixXcd program_matrix(const CircuitProgram& prog,
                                       const Eigen::VectorXd& params) {
  const long long dim = 1LL << prog.num_qubits;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& s : prog.sites) {
    Eigen::MatrixXcd local;
    if (s.kind == SiteKind::Fixed) {
      local = s.matrix;
    } else if (s.kind == SiteKind::Rotation) {
      const double angle = s.coeff * params[prog.groups[s.group].offset + s.local];
      local = oracle_rotation(s.axis, angle);
    } else {
      throw std::runtime_error("oracle only covers rotation/fixed sites");
    }
    total = embed_gate(local, s.qubits, s.controls, prog.num_qubits) * total;
  }
  return total;
}

// --- pooling degree oracle -------------------------------------------------

/// Definition-style degree check on a two-qubit pooling edge list:
/// controls appear exactly once as sources and never as targets, targets
/// never act as sources and lie in the kept set.
inline bool pooling_degrees_ok(const std::vector<std::vector<int>>& edges,
                               const std::vector<int>& kept,
                               const std::vector<int>& measured) {
  std::vector<int> sources, targets;
  for (const auto& e : edges) {
    if (e.size() != 2 || e[0] == e[1]) return false;
    sources.push_back(e[0]);
    targets.push_back(e[1]);
  }
  for (int m : measured) {
    long out = std::count(sources.begin(), sources.end(), m);
    long in = std::count(targets.begin(), targets.end(), m);
    if (out != 1 || in != 0) return false;
  }
  for (int t : targets) {
    if (std::count(sources.begin(), sources.end(), t) != 0) return false;
    if (std::find(kept.begin(), kept.end(), t) == kept.end()) return false;
  }
  for (int t : targets)
    if (std::count(targets.begin(), targets.end(), t) < 1) return false;
  return true;
}

// --- DOT checker -------------------------------------------------------------

/// Small structural DOT check: one digraph block, balanced braces, and
/// every statement is a subgraph header, attribute, node or edge line
/// terminated by a semicolon or brace.
inline bool dot_parses(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int depth = 0;
  bool saw_digraph = false;
  while (std::getline(in, line)) {
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::string t = line.substr(b);
    if (!saw_digraph) {
      if (t.rfind("digraph", 0) != 0 || t.back() != '{') return false;
      saw_digraph = true;
      ++depth;
      continue;
    }
    if (t == "}") {
      --depth;
      if (depth < 0) return false;
      continue;
    }
    if (t.rfind("subgraph", 0) == 0) {
      if (t.back() != '{') return false;
      ++depth;
      continue;
    }
    if (t.back() != ';') return false;
  }
  return saw_digraph && depth == 0;
}

}  // namespace motiq::test
