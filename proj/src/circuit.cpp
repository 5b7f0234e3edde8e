#include "motiq/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace motiq {

int CircuitProgram::param_count() const {
  int n = 0;
  for (const auto& g : groups) n += g.param_count;
  return n;
}

bool CircuitProgram::shift_rule_applies() const {
  return std::none_of(sites.begin(), sites.end(), [](const GateSite& s) {
    return s.kind == SiteKind::MatrixExp;
  });
}

// --- gate site builders -------------------------------------------------

namespace {

GateSite rot(RotationAxis axis, int q, int group, int local, double coeff = 1.0) {
  GateSite s;
  s.kind = SiteKind::Rotation;
  s.qubits = {q};
  s.axis = axis;
  s.group = group;
  s.local = local;
  s.coeff = coeff;
  return s;
}

GateSite fixed(Eigen::MatrixXcd m, std::vector<int> qubits, std::string label = {}) {
  GateSite s;
  s.qubits = std::move(qubits);
  s.matrix = std::move(m);
  s.label = std::move(label);
  return s;
}

const Eigen::Matrix2cd& mat_h() {
  static const Eigen::Matrix2cd m = [] {
    Eigen::Matrix2cd h;
    const double r = 1.0 / std::sqrt(2.0);
    h << r, r, r, -r;
    return h;
  }();
  return m;
}

const Eigen::Matrix2cd& mat_x() {
  static const Eigen::Matrix2cd m = [] {
    Eigen::Matrix2cd x;
    x << 0, 1, 1, 0;
    return x;
  }();
  return m;
}

const Eigen::Matrix4cd& mat_cx() {
  static const Eigen::Matrix4cd m = [] {
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Identity();
    c(2, 2) = 0;
    c(3, 3) = 0;
    c(2, 3) = 1;
    c(3, 2) = 1;
    return c;
  }();
  return m;
}

const Eigen::Matrix4cd& mat_cz() {
  static const Eigen::Matrix4cd m = [] {
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Identity();
    c(3, 3) = -1;
    return c;
  }();
  return m;
}

// Z on the target conditioned on the control being |0>.
const Eigen::Matrix4cd& mat_anti_cz() {
  static const Eigen::Matrix4cd m = [] {
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Identity();
    c(1, 1) = -1;
    return c;
  }();
  return m;
}

void emit_crz(int control, int target, int group, int local,
              std::vector<GateSite>& out) {
  out.push_back(rot(RotationAxis::Z, target, group, local, 0.5));
  out.push_back(fixed(mat_cx(), {control, target}));
  out.push_back(rot(RotationAxis::Z, target, group, local, -0.5));
  out.push_back(fixed(mat_cx(), {control, target}));
}

void emit_crx(int control, int target, int group, int local,
              std::vector<GateSite>& out) {
  out.push_back(fixed(mat_h(), {target}));
  emit_crz(control, target, group, local, out);
  out.push_back(fixed(mat_h(), {target}));
}

GateSite matexp(std::vector<int> qubits, int group, int exp_local, int exp_params,
                std::string label) {
  GateSite s;
  s.kind = SiteKind::MatrixExp;
  s.qubits = std::move(qubits);
  s.group = group;
  s.exp_local = exp_local;
  s.exp_params = exp_params;
  s.label = std::move(label);
  return s;
}

UnitaryMapping conv2(std::string name, int params,
                     std::function<void(int, int, int, std::vector<GateSite>&)> body,
                     std::function<void(int, int, std::vector<GateSite>&)> single) {
  UnitaryMapping m;
  m.name = std::move(name);
  m.arity = 2;
  m.param_count = params;
  m.emit = [body](const std::vector<int>& q, int g, std::vector<GateSite>& out) {
    body(q[0], q[1], g, out);
  };
  m.emit_single = std::move(single);
  return m;
}

}  // namespace

// --- registry -----------------------------------------------------------

Registry Registry::defaults() {
  Registry r;

  r.add(conv2("u_ttn", 2,
              [](int a, int b, int g, std::vector<GateSite>& out) {
                out.push_back(rot(RotationAxis::Y, a, g, 0));
                out.push_back(rot(RotationAxis::Y, b, g, 1));
                out.push_back(fixed(mat_cx(), {a, b}));
              },
              [](int q, int g, std::vector<GateSite>& out) {
                out.push_back(rot(RotationAxis::Y, q, g, 0));
              }));

  r.add(conv2("u_9", 2,
              [](int a, int b, int g, std::vector<GateSite>& out) {
                out.push_back(fixed(mat_h(), {a}));
                out.push_back(fixed(mat_h(), {b}));
                out.push_back(fixed(mat_cz(), {a, b}));
                out.push_back(rot(RotationAxis::X, a, g, 0));
                out.push_back(rot(RotationAxis::X, b, g, 1));
              },
              [](int q, int g, std::vector<GateSite>& out) {
                out.push_back(fixed(mat_h(), {q}));
                out.push_back(rot(RotationAxis::X, q, g, 0));
              }));

  r.add(conv2("u_15", 4,
              [](int a, int b, int g, std::vector<GateSite>& out) {
                out.push_back(rot(RotationAxis::Y, a, g, 0));
                out.push_back(rot(RotationAxis::Y, b, g, 1));
                out.push_back(fixed(mat_cx(), {b, a}));
                out.push_back(rot(RotationAxis::Y, a, g, 2));
                out.push_back(rot(RotationAxis::Y, b, g, 3));
                out.push_back(fixed(mat_cx(), {a, b}));
              },
              [](int q, int g, std::vector<GateSite>& out) {
                out.push_back(rot(RotationAxis::Y, q, g, 0));
                out.push_back(rot(RotationAxis::Y, q, g, 2));
              }));

  r.add(conv2("u_so4", 6,
              [](int a, int b, int g, std::vector<GateSite>& out) {
                out.push_back(rot(RotationAxis::Y, a, g, 0));
                out.push_back(rot(RotationAxis::Y, b, g, 1));
                out.push_back(fixed(mat_cx(), {a, b}));
                out.push_back(rot(RotationAxis::Y, a, g, 2));
                out.push_back(rot(RotationAxis::Y, b, g, 3));
                out.push_back(fixed(mat_cx(), {a, b}));
                out.push_back(rot(RotationAxis::Y, a, g, 4));
                out.push_back(rot(RotationAxis::Y, b, g, 5));
              },
              [](int q, int g, std::vector<GateSite>& out) {
                out.push_back(rot(RotationAxis::Y, q, g, 0));
                out.push_back(rot(RotationAxis::Y, q, g, 2));
                out.push_back(rot(RotationAxis::Y, q, g, 4));
              }));

  auto cr_pair = [](RotationAxis inner) {
    return [inner](int a, int b, int g, std::vector<GateSite>& out) {
      out.push_back(rot(RotationAxis::Y, a, g, 0));
      out.push_back(rot(RotationAxis::Y, b, g, 1));
      if (inner == RotationAxis::Z)
        emit_crz(b, a, g, 2, out);
      else
        emit_crx(b, a, g, 2, out);
      out.push_back(rot(RotationAxis::Y, a, g, 3));
      out.push_back(rot(RotationAxis::Y, b, g, 4));
      if (inner == RotationAxis::Z)
        emit_crz(a, b, g, 5, out);
      else
        emit_crx(a, b, g, 5, out);
    };
  };
  auto cr_single = [](int q, int g, std::vector<GateSite>& out) {
    out.push_back(rot(RotationAxis::Y, q, g, 0));
    out.push_back(rot(RotationAxis::Y, q, g, 3));
  };
  r.add(conv2("u_13", 6, cr_pair(RotationAxis::Z), cr_single));
  r.add(conv2("u_14", 6, cr_pair(RotationAxis::X), cr_single));

  auto ten = [](RotationAxis inner) {
    return [inner](int a, int b, int g, std::vector<GateSite>& out) {
      out.push_back(rot(RotationAxis::X, a, g, 0));
      out.push_back(rot(RotationAxis::X, b, g, 1));
      out.push_back(rot(RotationAxis::Z, a, g, 2));
      out.push_back(rot(RotationAxis::Z, b, g, 3));
      if (inner == RotationAxis::Z) {
        emit_crz(b, a, g, 4, out);
        emit_crz(a, b, g, 5, out);
      } else {
        emit_crx(b, a, g, 4, out);
        emit_crx(a, b, g, 5, out);
      }
      out.push_back(rot(RotationAxis::X, a, g, 6));
      out.push_back(rot(RotationAxis::X, b, g, 7));
      out.push_back(rot(RotationAxis::Z, a, g, 8));
      out.push_back(rot(RotationAxis::Z, b, g, 9));
    };
  };
  auto ten_single = [](int q, int g, std::vector<GateSite>& out) {
    out.push_back(rot(RotationAxis::X, q, g, 0));
    out.push_back(rot(RotationAxis::Z, q, g, 2));
    out.push_back(rot(RotationAxis::X, q, g, 6));
    out.push_back(rot(RotationAxis::Z, q, g, 8));
  };
  r.add(conv2("u_5", 10, ten(RotationAxis::Z), ten_single));
  r.add(conv2("u_6", 10, ten(RotationAxis::X), ten_single));

  // Pooling. v_pool applies X on the target for control 1 and Z for
  // control 0; v_cx is the plain CNOT used by the measurement
  // equivalence checks.
  {
    UnitaryMapping m;
    m.name = "v_pool";
    m.arity = 2;
    m.param_count = 0;
    m.pooling = true;
    m.emit = [](const std::vector<int>& q, int, std::vector<GateSite>& out) {
      out.push_back(fixed(mat_cx(), {q[0], q[1]}));
      out.push_back(fixed(mat_anti_cz(), {q[0], q[1]}));
    };
    r.add(std::move(m));
  }
  {
    UnitaryMapping m;
    m.name = "v_cx";
    m.arity = 2;
    m.param_count = 0;
    m.pooling = true;
    m.emit = [](const std::vector<int>& q, int, std::vector<GateSite>& out) {
      out.push_back(fixed(mat_cx(), {q[0], q[1]}));
    };
    r.add(std::move(m));
  }
  {
    UnitaryMapping m;
    m.name = "v_crz";
    m.arity = 2;
    m.param_count = 1;
    m.pooling = true;
    m.emit = [](const std::vector<int>& q, int g, std::vector<GateSite>& out) {
      emit_crz(q[0], q[1], g, 0, out);
    };
    r.add(std::move(m));
  }
  {
    UnitaryMapping m;
    m.name = "v_crx";
    m.arity = 2;
    m.param_count = 1;
    m.pooling = true;
    m.emit = [](const std::vector<int>& q, int g, std::vector<GateSite>& out) {
      emit_crx(q[0], q[1], g, 0, out);
    };
    r.add(std::move(m));
  }
  {
    UnitaryMapping m;
    m.name = "v_rzrx";
    m.arity = 2;
    m.param_count = 2;
    m.pooling = true;
    m.emit = [](const std::vector<int>& q, int g, std::vector<GateSite>& out) {
      emit_crz(q[0], q[1], g, 0, out);
      out.push_back(fixed(mat_x(), {q[0]}));
      emit_crx(q[0], q[1], g, 1, out);
      out.push_back(fixed(mat_x(), {q[0]}));
    };
    r.add(std::move(m));
  }

  for (int v = 1; v <= 4; ++v) {
    UnitaryMapping m;
    m.name = "u_gm" + std::to_string(v);
    m.arity = v;
    m.param_count = (1 << (2 * v)) - 1;  // 4^v - 1
    m.rotation_generated = false;
    const std::string label = m.name;
    const int params = m.param_count;
    m.emit = [label, params](const std::vector<int>& q, int g,
                             std::vector<GateSite>& out) {
      out.push_back(matexp(q, g, 0, params, label));
    };
    m.emit_single = [label](int q, int g, std::vector<GateSite>& out) {
      out.push_back(matexp({q}, g, 0, 3, label));
    };
    r.add(std::move(m));
  }

  return r;
}

bool Registry::contains(const std::string& name) const {
  return table_.count(name) > 0;
}

const UnitaryMapping& Registry::at(const std::string& name) const {
  auto it = table_.find(name);
  if (it == table_.end()) throw ConfigError("unknown unitary mapping: " + name);
  return it->second;
}

void Registry::add(UnitaryMapping m) {
  std::string key = m.name;
  table_[std::move(key)] = std::move(m);
}

std::vector<std::string> Registry::names() const {
  std::vector<std::string> out;
  out.reserve(table_.size());
  for (const auto& [k, v] : table_) out.push_back(k);
  return out;
}

void Registry::add_motif_mapping(const std::string& name, const Motif& motif) {
  CircuitProgram sub = compile(resolve(motif), *this);
  const int arity = sub.num_qubits;
  UnitaryMapping m;
  m.name = name;
  m.arity = arity;
  m.param_count = sub.param_count();
  m.rotation_generated = sub.shift_rule_applies();
  // Each application shares the set; clone the sub-sites with qubits
  // remapped onto the edge tuple and locals rebased into one flat group.
  auto sites = std::make_shared<std::vector<GateSite>>(sub.sites);
  auto groups = std::make_shared<std::vector<ParamGroup>>(sub.groups);
  m.emit = [sites, groups, arity, name](const std::vector<int>& q, int g,
                                        std::vector<GateSite>& out) {
    for (GateSite s : *sites) {
      for (int& sq : s.qubits) sq = q.at(sq);
      for (int& sc : s.controls) sc = q.at(sc);
      if (s.group >= 0) {
        const int base = (*groups)[s.group].offset;
        if (s.kind == SiteKind::Rotation)
          s.local += base;
        else
          s.exp_local += base;
        s.group = g;
      }
      out.push_back(std::move(s));
    }
  };
  add(std::move(m));
}

// --- compile ------------------------------------------------------------

namespace {

// Wrap already-emitted sites in a computational-basis control. Rotations
// are rewritten with the half-angle conjugation so the shift rule keeps
// two terms per site.
void controlify(std::vector<GateSite>& sites, size_t first, int control) {
  std::vector<GateSite> rewritten;
  rewritten.reserve(sites.size() - first);
  for (size_t i = first; i < sites.size(); ++i) {
    GateSite& s = sites[i];
    if (s.kind == SiteKind::Rotation) {
      const int t = s.qubits[0];
      const Eigen::Matrix4cd& conj =
          s.axis == RotationAxis::X ? mat_cz() : mat_cx();
      GateSite half = s;
      half.coeff = s.coeff * 0.5;
      GateSite neg = s;
      neg.coeff = -s.coeff * 0.5;
      rewritten.push_back(std::move(half));
      rewritten.push_back(fixed(conj, {control, t}));
      rewritten.push_back(std::move(neg));
      rewritten.push_back(fixed(conj, {control, t}));
    } else {
      s.controls.push_back(control);
      rewritten.push_back(std::move(s));
    }
  }
  sites.resize(first);
  for (auto& s : rewritten) sites.push_back(std::move(s));
}

bool is_self_loop(const std::vector<int>& edge) {
  return edge.size() == 1 || (edge.size() == 2 && edge[0] == edge[1]);
}

}  // namespace

CircuitProgram compile(const std::vector<PrimitiveGraph>& graphs,
                       const Registry& registry, const CompileOptions& opts) {
  CircuitProgram prog;
  int max_label = -1;
  for (const auto& g : graphs)
    for (int q : g.qubits) max_label = std::max(max_label, q);
  prog.num_qubits = max_label + 1;
  if (prog.num_qubits == 0) throw ConfigError("cannot compile an empty circuit");

  auto new_group = [&prog](const std::string& mapping, int count) {
    ParamGroup g;
    g.mapping = mapping;
    g.param_count = count;
    g.offset = prog.param_count();
    prog.groups.push_back(g);
    return static_cast<int>(prog.groups.size()) - 1;
  };

  for (const auto& g : graphs) {
    if (!g.operational()) continue;
    const UnitaryMapping& mapping = registry.at(g.mapping);
    int group = -1;
    if (opts.share_weights) group = new_group(mapping.name, mapping.param_count);

    for (const auto& edge : g.edges) {
      if (!opts.share_weights) group = new_group(mapping.name, mapping.param_count);
      EdgeBlock block;
      block.mapping = mapping.name;
      block.group = group;
      block.qubits = edge;
      block.first_site = prog.sites.size();

      if (g.kind == PrimitiveKind::Qpool) {
        const int nc = std::max(g.num_controls, 1);
        std::vector<int> targets(edge.begin() + nc, edge.end());
        if (mapping.pooling) {
          if (nc != 1 || static_cast<int>(edge.size()) != mapping.arity)
            throw ConfigError("mapping " + mapping.name + " expects " +
                              std::to_string(mapping.arity) +
                              "-qubit pooling edges");
          mapping.emit(edge, group, prog.sites);
        } else {
          if (static_cast<int>(targets.size()) != mapping.arity)
            throw ConfigError("mapping " + mapping.name + " acts on " +
                              std::to_string(mapping.arity) +
                              " qubits but the pooling edge keeps " +
                              std::to_string(targets.size()));
          for (int c = 0; c < nc; ++c) {
            const size_t first = prog.sites.size();
            mapping.emit(targets, group, prog.sites);
            controlify(prog.sites, first, edge[c]);
          }
        }
      } else {
        if (is_self_loop(edge)) {
          if (!mapping.emit_single)
            throw ConfigError("mapping " + mapping.name +
                              " has no single-qubit form for a one-qubit layer");
          mapping.emit_single(edge[0], group, prog.sites);
        } else {
          if (static_cast<int>(edge.size()) != mapping.arity)
            throw ConfigError("mapping " + mapping.name + " has arity " +
                              std::to_string(mapping.arity) + " but the edge has " +
                              std::to_string(edge.size()) + " qubits");
          mapping.emit(edge, group, prog.sites);
        }
      }
      block.last_site = prog.sites.size();
      prog.blocks.push_back(std::move(block));
    }
  }

  prog.counts = count_unitaries(graphs);

  if (opts.readout) {
    const int q = *opts.readout - 1;
    if (q < 0 || q >= prog.num_qubits)
      throw ConfigError("readout qubit out of range");
    prog.readout = q;
  } else {
    std::vector<int> avail;
    for (const auto& g : graphs)
      avail = g.kind == PrimitiveKind::Qfree ? g.qubits : g.surviving_qubits();
    prog.readout = avail.empty() ? 0 : avail.front();
  }
  return prog;
}

// --- simulation -----------------------------------------------------------

StateVector zero_state(int num_qubits) {
  StateVector psi = StateVector::Zero(1LL << num_qubits);
  psi[0] = 1.0;
  return psi;
}

namespace {

Eigen::Matrix2cd rotation_matrix(RotationAxis axis, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Eigen::Matrix2cd m;
  switch (axis) {
    case RotationAxis::X:
      m << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0);
      break;
    case RotationAxis::Y:
      m << Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0);
      break;
    case RotationAxis::Z:
      m << std::exp(Complex(0, -angle / 2)), Complex(0, 0), Complex(0, 0),
          std::exp(Complex(0, angle / 2));
      break;
  }
  return m;
}

void apply_1q(StateVector& psi, const Eigen::Matrix2cd& u, int q) {
  const long long n = psi.size();
  const long long bit = 1LL << q;
  const Complex a = u(0, 0), b = u(0, 1), c = u(1, 0), d = u(1, 1);
  for (long long i = 0; i < n; ++i) {
    if (i & bit) continue;
    const Complex lo = psi[i], hi = psi[i | bit];
    psi[i] = a * lo + b * hi;
    psi[i | bit] = c * lo + d * hi;
  }
}

}  // namespace

void apply_gate(StateVector& psi, const Eigen::MatrixXcd& u,
                const std::vector<int>& qubits, const std::vector<int>& controls) {
  const int k = static_cast<int>(qubits.size());
  if (k == 1 && controls.empty()) {
    apply_1q(psi, u, qubits[0]);
    return;
  }
  const int d = 1 << k;
  if (u.rows() != d || u.cols() != d)
    throw ConfigError("gate matrix dimension does not match its qubit count");

  std::vector<int> pinned = qubits;
  pinned.insert(pinned.end(), controls.begin(), controls.end());
  std::sort(pinned.begin(), pinned.end());
  long long control_mask = 0;
  for (int c : controls) control_mask |= 1LL << c;
  std::vector<long long> qbit(k);
  for (int j = 0; j < k; ++j) qbit[j] = 1LL << qubits[j];

  const long long free_count = psi.size() >> pinned.size();
  Eigen::VectorXcd amp(d), out(d);
  for (long long f = 0; f < free_count; ++f) {
    long long base = f;
    for (int pos : pinned) {
      const long long low = base & ((1LL << pos) - 1);
      base = ((base >> pos) << (pos + 1)) | low;
    }
    base |= control_mask;
    for (int l = 0; l < d; ++l) {
      long long idx = base;
      for (int j = 0; j < k; ++j)
        if ((l >> (k - 1 - j)) & 1) idx |= qbit[j];
      amp[l] = psi[idx];
    }
    out.noalias() = u * amp;
    for (int l = 0; l < d; ++l) {
      long long idx = base;
      for (int j = 0; j < k; ++j)
        if ((l >> (k - 1 - j)) & 1) idx |= qbit[j];
      psi[idx] = out[l];
    }
  }
}

std::vector<Eigen::MatrixXcd> gellmann_basis(int dim) {
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(static_cast<size_t>(dim) * dim - 1);
  for (int j = 0; j < dim; ++j)
    for (int kk = j + 1; kk < dim; ++kk) {
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(dim, dim);
      sym(j, kk) = 1;
      sym(kk, j) = 1;
      basis.push_back(std::move(sym));
      Eigen::MatrixXcd anti = Eigen::MatrixXcd::Zero(dim, dim);
      anti(j, kk) = Complex(0, -1);
      anti(kk, j) = Complex(0, 1);
      basis.push_back(std::move(anti));
    }
  for (int l = 1; l < dim; ++l) {
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(dim, dim);
    const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) diag(j, j) = norm;
    diag(l, l) = -l * norm;
    basis.push_back(std::move(diag));
  }
  return basis;
}

namespace {

Eigen::MatrixXcd matexp_unitary(const GateSite& s, const Eigen::VectorXd& params,
                                const std::vector<ParamGroup>& groups) {
  const int dim = 1 << s.qubits.size();
  const auto basis = gellmann_basis(dim);
  if (s.exp_params > static_cast<int>(basis.size()))
    throw ConfigError("matrix-exponential site exceeds its generator basis");
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
  const int base = groups[s.group].offset + s.exp_local;
  for (int a = 0; a < s.exp_params; ++a) gen += params[base + a] * basis[a];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gen);
  Eigen::VectorXcd phases(dim);
  for (int i = 0; i < dim; ++i)
    phases[i] = std::exp(Complex(0, es.eigenvalues()[i]));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

void apply_site(StateVector& psi, const GateSite& s, const Eigen::VectorXd& params,
                const std::vector<ParamGroup>& groups, double shift) {
  switch (s.kind) {
    case SiteKind::Fixed:
      apply_gate(psi, s.matrix, s.qubits, s.controls);
      break;
    case SiteKind::Rotation: {
      const double theta = params[groups[s.group].offset + s.local];
      apply_1q(psi, rotation_matrix(s.axis, s.coeff * theta + shift), s.qubits[0]);
      break;
    }
    case SiteKind::MatrixExp:
      apply_gate(psi, matexp_unitary(s, params, groups), s.qubits, s.controls);
      break;
  }
}

}  // namespace

StateVector run(const CircuitProgram& prog, const Eigen::VectorXd& params,
                const StateVector& input) {
  if (input.size() != (1LL << prog.num_qubits))
    throw ConfigError("input state dimension does not match the qubit count");
  if (params.size() != prog.param_count())
    throw ConfigError("parameter vector length " + std::to_string(params.size()) +
                      " does not match the program's " +
                      std::to_string(prog.param_count()));
  StateVector psi = input;
  for (const auto& s : prog.sites) apply_site(psi, s, params, prog.groups, 0.0);
  return psi;
}

StateVector run_shifted(const CircuitProgram& prog, const Eigen::VectorXd& params,
                        const StateVector& input, size_t site, double delta) {
  StateVector psi = input;
  for (size_t i = 0; i < prog.sites.size(); ++i)
    apply_site(psi, prog.sites[i], params, prog.groups, i == site ? delta : 0.0);
  return psi;
}

double readout_probability(const StateVector& psi, int qubit) {
  const long long bit = 1LL << qubit;
  double p = 0;
  for (long long i = 0; i < psi.size(); ++i)
    if (i & bit) p += std::norm(psi[i]);
  return p;
}

double expectation_z(const StateVector& psi, int qubit) {
  return 1.0 - 2.0 * readout_probability(psi, qubit);
}

Encoding encoding_from_string(const std::string& s) {
  if (s == "qubit") return Encoding::Qubit;
  if (s == "iqp") return Encoding::Iqp;
  if (s == "amplitude") return Encoding::Amplitude;
  throw ConfigError("unknown encoding: " + s);
}

std::string to_string(Encoding e) {
  switch (e) {
    case Encoding::Qubit: return "qubit";
    case Encoding::Iqp: return "iqp";
    case Encoding::Amplitude: return "amplitude";
  }
  return "?";
}

StateVector encode(const Eigen::VectorXd& data, Encoding scheme, int num_qubits) {
  const long long dim = 1LL << num_qubits;
  switch (scheme) {
    case Encoding::Amplitude: {
      if (data.size() > dim)
        throw ConfigError("amplitude encoding takes at most 2^N values");
      const double norm = data.norm();
      if (norm == 0.0) throw ConfigError("amplitude encoding of a zero vector");
      StateVector psi = StateVector::Zero(dim);
      for (long long i = 0; i < data.size(); ++i) psi[i] = data[i] / norm;
      return psi;
    }
    case Encoding::Qubit: {
      if (data.size() != num_qubits)
        throw ConfigError("qubit encoding needs one value per qubit");
      StateVector psi(dim);
      for (long long i = 0; i < dim; ++i) {
        double a = 1.0;
        for (int q = 0; q < num_qubits; ++q)
          a *= (i >> q) & 1 ? std::sin(data[q]) : std::cos(data[q]);
        psi[i] = a;
      }
      return psi;
    }
    case Encoding::Iqp: {
      if (data.size() != num_qubits)
        throw ConfigError("IQP encoding needs one value per qubit");
      StateVector psi = zero_state(num_qubits);
      for (int rep = 0; rep < 2; ++rep) {
        for (int q = 0; q < num_qubits; ++q) apply_1q(psi, mat_h(), q);
        for (int q = 0; q < num_qubits; ++q) {
          Eigen::Matrix2cd pz = Eigen::Matrix2cd::Zero();
          pz(0, 0) = std::exp(Complex(0, data[q]));
          pz(1, 1) = std::exp(Complex(0, -data[q]));
          apply_1q(psi, pz, q);
        }
        for (int q = 0; q + 1 < num_qubits; ++q) {
          const double t = data[q] * data[q + 1];
          Eigen::Matrix4cd zz = Eigen::Matrix4cd::Zero();
          zz(0, 0) = std::exp(Complex(0, t));
          zz(1, 1) = std::exp(Complex(0, -t));
          zz(2, 2) = std::exp(Complex(0, -t));
          zz(3, 3) = std::exp(Complex(0, t));
          apply_gate(psi, zz, {q, q + 1});
        }
      }
      return psi;
    }
  }
  throw ConfigError("unknown encoding");
}

Eigen::MatrixXcd mapping_unitary(const UnitaryMapping& mapping,
                                 const Eigen::VectorXd& params) {
  if (params.size() != mapping.param_count)
    throw ConfigError("parameter count mismatch for mapping " + mapping.name);
  std::vector<GateSite> sites;
  std::vector<int> qubits(mapping.arity);
  for (int j = 0; j < mapping.arity; ++j) qubits[j] = mapping.arity - 1 - j;
  mapping.emit(qubits, 0, sites);
  std::vector<ParamGroup> groups{{mapping.name, mapping.param_count, 0}};
  const int dim = 1 << mapping.arity;
  Eigen::MatrixXcd u(dim, dim);
  for (int col = 0; col < dim; ++col) {
    StateVector psi = StateVector::Zero(dim);
    psi[col] = 1.0;
    for (const auto& s : sites) apply_site(psi, s, params, groups, 0.0);
    u.col(col) = psi;
  }
  return u;
}

std::string to_qasm(const CircuitProgram& prog, const Eigen::VectorXd& params) {
  if (params.size() != prog.param_count())
    throw ConfigError("parameter vector length does not match the program");
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  std::set<std::pair<std::string, size_t>> declared;
  for (const auto& b : prog.blocks) {
    auto key = std::make_pair(b.mapping, b.qubits.size());
    if (!declared.insert(key).second) continue;
    const int np = prog.groups[b.group].param_count;
    out << "opaque " << b.mapping << "_" << b.qubits.size();
    if (np > 0) {
      out << "(";
      for (int i = 0; i < np; ++i) out << (i ? "," : "") << "p" << i;
      out << ")";
    }
    for (size_t i = 0; i < b.qubits.size(); ++i)
      out << (i ? "," : " ") << "a" << i;
    out << ";\n";
  }
  out << "qreg q[" << prog.num_qubits << "];\n";
  out << "creg c[1];\n";
  for (const auto& b : prog.blocks) {
    const ParamGroup& g = prog.groups[b.group];
    out << b.mapping << "_" << b.qubits.size();
    if (g.param_count > 0) {
      out << "(";
      for (int i = 0; i < g.param_count; ++i)
        out << (i ? "," : "") << params[g.offset + i];
      out << ")";
    }
    for (size_t i = 0; i < b.qubits.size(); ++i)
      out << (i ? "," : " ") << "q[" << b.qubits[i] << "]";
    out << ";\n";
  }
  out << "measure q[" << prog.readout << "] -> c[0];\n";
  return out.str();
}

std::string state_to_csv(const StateVector& psi) {
  std::ostringstream out;
  out << "index,re,im\n";
  out.precision(17);
  for (long long i = 0; i < psi.size(); ++i)
    out << i << "," << psi[i].real() << "," << psi[i].imag() << "\n";
  return out.str();
}

}  // namespace motiq
