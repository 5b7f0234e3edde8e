#include "motiq/ising.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace motiq {

namespace {

struct PauliTerm {
  enum Kind { ZXZ, X, XX, Z } kind;
  int site;  // leftmost qubit, 0-based
  double coeff;
};

std::vector<PauliTerm> hamiltonian_terms(const ClusterIsingParams& p,
                                         double tie_break) {
  if (p.sites < 3) throw ConfigError("the cluster chain needs at least 3 spins");
  std::vector<PauliTerm> terms;
  for (int i = 0; i + 2 < p.sites; ++i)
    terms.push_back({PauliTerm::ZXZ, i, -p.j});
  for (int i = 0; i < p.sites; ++i) terms.push_back({PauliTerm::X, i, -p.h1});
  for (int i = 0; i + 1 < p.sites; ++i)
    terms.push_back({PauliTerm::XX, i, -p.h2});
  if (tie_break != 0.0)
    for (int i = 0; i < p.sites; ++i)
      terms.push_back({PauliTerm::Z, i, tie_break});
  return terms;
}

// y = H x for the real-symmetric Hamiltonian (no Y operators appear).
void apply_terms(const std::vector<PauliTerm>& terms, const Eigen::VectorXd& x,
                 Eigen::VectorXd& y) {
  y.setZero();
  const long long dim = x.size();
  for (const auto& t : terms) {
    if (t.coeff == 0.0) continue;
    switch (t.kind) {
      case PauliTerm::ZXZ: {
        const long long flip = 1LL << (t.site + 1);
        const long long b0 = t.site, b2 = t.site + 2;
        for (long long i = 0; i < dim; ++i) {
          const double sign = ((i >> b0) ^ (i >> b2)) & 1 ? -1.0 : 1.0;
          y[i ^ flip] += t.coeff * sign * x[i];
        }
        break;
      }
      case PauliTerm::X: {
        const long long flip = 1LL << t.site;
        for (long long i = 0; i < dim; ++i) y[i ^ flip] += t.coeff * x[i];
        break;
      }
      case PauliTerm::XX: {
        const long long flip = (1LL << t.site) | (1LL << (t.site + 1));
        for (long long i = 0; i < dim; ++i) y[i ^ flip] += t.coeff * x[i];
        break;
      }
      case PauliTerm::Z: {
        for (long long i = 0; i < dim; ++i)
          y[i] += ((i >> t.site) & 1 ? -t.coeff : t.coeff) * x[i];
        break;
      }
    }
  }
}

}  // namespace

void apply_cluster_ising(const ClusterIsingParams& params, double tie_break,
                         const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  if (x.size() != (1LL << params.sites))
    throw ConfigError("vector dimension does not match the spin count");
  y.resize(x.size());
  apply_terms(hamiltonian_terms(params, tie_break), x, y);
}

namespace {

// Deterministic pseudo-random start vector (splitmix64 stream).
Eigen::VectorXd start_vector(long long dim) {
  Eigen::VectorXd v(dim);
  uint64_t s = 0x9e3779b97f4a7c15ull;
  for (long long i = 0; i < dim; ++i) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    v[i] = static_cast<double>(z >> 11) / 9007199254740992.0 - 0.5;
  }
  v.normalize();
  return v;
}

}  // namespace

GroundState ground_state(const ClusterIsingParams& params,
                         const GroundStateOptions& opts) {
  const auto terms = hamiltonian_terms(params, opts.tie_break);
  const long long dim = 1LL << params.sites;
  const int m_max = std::min<long long>(dim, opts.max_lanczos);

  Eigen::VectorXd v = start_vector(dim);
  double energy = 0;
  Eigen::VectorXd work(dim);

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(m_max);
    std::vector<double> alpha, beta;
    Eigen::VectorXd w(dim);
    basis.push_back(v);
    for (int k = 0; k < m_max; ++k) {
      apply_terms(terms, basis[k], w);
      double a = basis[k].dot(w);
      alpha.push_back(a);
      w -= a * basis[k];
      if (k > 0) w -= beta[k - 1] * basis[k - 1];
      for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
      const double nrm = w.norm();
      if (nrm < 1e-13 || k + 1 == m_max) break;
      beta.push_back(nrm);
      basis.push_back(w / nrm);
    }
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    energy = es.eigenvalues()[0];
    Eigen::VectorXd ritz = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < m; ++i) ritz += es.eigenvectors()(i, 0) * basis[i];
    ritz.normalize();
    apply_terms(terms, ritz, work);
    const double residual = (work - energy * ritz).norm();
    v = ritz;
    if (residual < opts.residual_tol) break;
    if (restart == opts.max_restarts) {
      // Accept near-degenerate ground spaces where only the energy has
      // settled; anything worse is a genuine failure.
      if (residual > 1e-4)
        throw NumericError("ground-state solver did not converge (residual " +
                           std::to_string(residual) + ")");
    }
  }

  GroundState gs;
  gs.energy = energy;
  gs.state = v.cast<Complex>();
  return gs;
}

double sample_complexity(double p, double m_cap, bool literal_form) {
  if (m_cap <= 0) throw ConfigError("the sample-complexity cap must be positive");
  if (p < -1e-12 || p > 1 + 1e-12)
    throw ConfigError("a probability must lie in [0, 1]");
  p = std::min(1.0, std::max(0.0, p));
  const double z2 = 1.96 * 1.96;
  if (literal_form) {
    const double denom = std::asin(std::sqrt(p)) - std::sqrt(std::asin(0.5));
    if (denom == 0.0) return m_cap;
    return z2 / denom;
  }
  const double denom = std::asin(std::sqrt(p)) - std::asin(std::sqrt(0.5));
  if (denom == 0.0) return m_cap;
  return std::min(m_cap, z2 / (denom * denom));
}

// --- cache ---------------------------------------------------------------

GroundStateCache::GroundStateCache(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

namespace {

std::string cache_key(const ClusterIsingParams& p) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "gs_%d_%.12g_%.12g_%.12g", p.sites, p.j, p.h1,
                p.h2);
  return buf;
}

}  // namespace

StateVector GroundStateCache::get(const ClusterIsingParams& params,
                                  const GroundStateOptions& opts) {
  const std::string key = cache_key(params);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mem_.find(key);
    if (it != mem_.end()) return it->second;
  }
  const long long dim = 1LL << params.sites;
  if (!dir_.empty()) {
    std::ifstream in(dir_ + "/" + key + ".bin", std::ios::binary);
    if (in) {
      StateVector psi(dim);
      std::vector<double> raw(2 * dim);
      in.read(reinterpret_cast<char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(double)));
      if (in.gcount() ==
          static_cast<std::streamsize>(raw.size() * sizeof(double))) {
        for (long long i = 0; i < dim; ++i)
          psi[i] = Complex(raw[2 * i], raw[2 * i + 1]);
        std::lock_guard<std::mutex> lock(mu_);
        mem_[key] = psi;
        return psi;
      }
    }
  }
  StateVector psi = ground_state(params, opts).state;
  if (!dir_.empty()) {
    std::ofstream out(dir_ + "/" + key + ".bin", std::ios::binary);
    std::vector<double> raw(2 * dim);
    for (long long i = 0; i < dim; ++i) {
      raw[2 * i] = psi[i].real();
      raw[2 * i + 1] = psi[i].imag();
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(double)));
  }
  std::lock_guard<std::mutex> lock(mu_);
  mem_[key] = psi;
  return psi;
}

// --- grids ----------------------------------------------------------------

namespace {

void parallel_points(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&next, n, &fn] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string region_for(const std::vector<RegionTag>& regions, double h1,
                       double h2) {
  for (const auto& r : regions)
    if (std::abs(r.h1 - h1) < 1e-9 && std::abs(r.h2 - h2) < 1e-9) return r.tag;
  return "untagged";
}

}  // namespace

PhaseGrid phase_diagram(const CircuitProgram& prog, const Eigen::VectorXd& params,
                        const GridSpec& grid, const std::vector<RegionTag>& regions,
                        GroundStateCache* cache, int workers) {
  if (grid.sites != prog.num_qubits)
    throw ConfigError("grid spin count does not match the circuit width");
  if (grid.h1_steps < 1 || grid.h2_steps < 1)
    throw ConfigError("grid dimensions must be positive");
  GroundStateCache local;
  if (!cache) cache = &local;

  std::vector<std::pair<double, double>> coords;
  for (int i = 0; i < grid.h1_steps; ++i)
    for (int k = 0; k < grid.h2_steps; ++k) {
      const double h1 = grid.h1_steps == 1
                            ? grid.h1_min
                            : grid.h1_min + i * (grid.h1_max - grid.h1_min) /
                                                (grid.h1_steps - 1);
      const double h2 = grid.h2_steps == 1
                            ? grid.h2_min
                            : grid.h2_min + k * (grid.h2_max - grid.h2_min) /
                                                (grid.h2_steps - 1);
      coords.emplace_back(h1, h2);
    }

  PhaseGrid out;
  out.points.resize(coords.size());
  parallel_points(static_cast<int>(coords.size()), workers, [&](int i) {
    const auto [h1, h2] = coords[i];
    ClusterIsingParams p{grid.sites, grid.j, h1, h2};
    const StateVector gs = cache->get(p);
    const StateVector final_state = run(prog, params, gs);
    PhasePoint pt;
    pt.h1 = h1;
    pt.h2 = h2;
    pt.expectation = expectation_z(final_state, prog.readout);
    pt.region = region_for(regions, h1, h2);
    out.points[i] = pt;
  });
  return out;
}

std::vector<RegionTag> load_region_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open region mask: " + path);
  std::vector<RegionTag> tags;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("h1", 0) == 0) continue;  // header
    }
    std::stringstream ss(line);
    RegionTag t;
    std::string cell;
    if (!std::getline(ss, cell, ',')) continue;
    t.h1 = std::stod(cell);
    if (!std::getline(ss, cell, ',')) throw ConfigError("bad region row: " + line);
    t.h2 = std::stod(cell);
    if (!std::getline(ss, cell, ',')) throw ConfigError("bad region row: " + line);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    t.tag = cell;
    tags.push_back(std::move(t));
  }
  return tags;
}

void write_phase_csv(const PhaseGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write phase diagram: " + path);
  out << "h1,h2,expectation,region\n";
  out.precision(17);
  for (const auto& p : grid.points)
    out << p.h1 << "," << p.h2 << "," << p.expectation << "," << p.region << "\n";
}

LinePoints spt_line(const LineSpec& spec, GroundStateCache* cache, int workers) {
  if (spec.points < 2) throw ConfigError("a training line needs at least 2 points");
  GroundStateCache local;
  if (!cache) cache = &local;
  LinePoints line;
  line.h1.resize(spec.points);
  line.states.resize(spec.points);
  line.labels.resize(spec.points);
  parallel_points(spec.points, workers, [&](int i) {
    const double h1 = spec.h1_min + i * (spec.h1_max - spec.h1_min) /
                                        (spec.points - 1);
    line.h1[i] = h1;
    line.labels[i] = h1 <= 1.0 ? 1 : 0;
    line.states[i] = cache->get({spec.sites, spec.j, h1, spec.h2});
  });
  return line;
}

FitResult train_line(const CircuitProgram& prog, const LineSpec& spec,
                     const TrainConfig& cfg, GroundStateCache* cache) {
  if (spec.sites != prog.num_qubits)
    throw ConfigError("line spin count does not match the circuit width");
  LinePoints line = spt_line(spec, cache);
  std::vector<int> idx(line.states.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto states = [&line](int i) { return line.states[i]; };
  return fit_states(prog, states, line.labels, idx, cfg);
}

std::vector<RegionTag> default_line_regions(const LineSpec& spec) {
  std::vector<RegionTag> tags;
  for (int i = 0; i < spec.points; ++i) {
    const double h1 = spec.h1_min + i * (spec.h1_max - spec.h1_min) /
                                        (spec.points - 1);
    RegionTag t;
    t.h1 = h1;
    t.h2 = spec.h2;
    if (h1 <= 0.5)
      t.tag = "middle";
    else if (h1 <= 1.0)
      t.tag = "inside";
    else if (h1 <= 1.5)
      t.tag = "outside";
    else
      continue;
    tags.push_back(std::move(t));
  }
  return tags;
}

void validate(const FitnessWeights& w) {
  if (w.c1 < 0 || w.c2 < 0 || w.c3 < 0)
    throw ConfigError("fitness weights must be non-negative");
  if (std::abs(w.c1 + w.c2 + w.c3 - 1.0) > 1e-12)
    throw ConfigError("fitness weights must sum to one");
  if (w.lambda < 0) throw ConfigError("lambda must be non-negative");
  if (w.m_cap <= 0) throw ConfigError("m_cap must be positive");
}

double fitness_score(const PhaseGrid& grid, int n_params,
                     const FitnessWeights& w) {
  validate(w);
  double m_in = 0, m_mid = 0, mse = 0;
  int n_in = 0, n_mid = 0, n_out = 0;
  for (const auto& p : grid.points) {
    if (p.region == "inside") {
      m_in += sample_complexity((p.expectation + 1) / 2, w.m_cap);
      ++n_in;
    } else if (p.region == "middle") {
      m_mid += sample_complexity((p.expectation + 1) / 2, w.m_cap);
      ++n_mid;
    } else if (p.region == "outside") {
      const double d = p.expectation - w.outside_target;
      mse += d * d;
      ++n_out;
    }
  }
  if (n_in == 0 || n_mid == 0 || n_out == 0)
    throw ConfigError("fitness needs points in all of inside/middle/outside");
  return w.c1 * (m_in / n_in) / w.m_cap + w.c2 * (m_mid / n_mid) / w.m_cap +
         w.c3 * (mse / n_out) + w.lambda * n_params;
}

}  // namespace motiq
