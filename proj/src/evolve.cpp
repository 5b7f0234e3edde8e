#include "motiq/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

namespace motiq {

using nlohmann::json;

long MemoryTable::append(Genotype g) {
  g.id = static_cast<long>(rows_.size());
  rows_.push_back(std::move(g));
  return rows_.back().id;
}

long MemoryTable::best_id() const {
  long best = -1;
  for (const auto& g : rows_) {
    if (!g.fitness) continue;
    if (best < 0 || *g.fitness < *rows_[best].fitness) best = g.id;
  }
  return best;
}

namespace {

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  if (v.empty()) throw ConfigError("sampler has an empty choice list");
  std::uniform_int_distribution<size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

bool resolves(const PrimitiveSequence& seq) {
  try {
    resolve(seq);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

Motif motif_from_sequence(const PrimitiveSequence& seq) {
  std::vector<Motif> children;
  children.reserve(seq.size());
  for (const auto& p : seq) children.push_back(Motif::make_primitive(p.kind, p.params));
  if (children.size() == 1) return children.front();
  return Motif::make_composite(std::move(children));
}

}  // namespace

Motif PrimitiveSampler::sample(std::mt19937_64& rng) const {
  const PrimitiveKind kind = pick(kinds, rng);
  Hyperparams h;
  switch (kind) {
    case PrimitiveKind::Qconv: {
      h.stride = pick(conv_strides, rng);
      std::discrete_distribution<int> dq(qpu_weights.begin(), qpu_weights.end());
      h.qpu = qpu_values.at(dq(rng));
      h.mapping = h.qpu == 2 ? pick(conv_mappings, rng)
                             : "u_gm" + std::to_string(h.qpu);
      return qconv(std::move(h));
    }
    case PrimitiveKind::Qdense:
      h.mapping = pick(conv_mappings, rng);
      return qdense(std::move(h));
    case PrimitiveKind::Qpool:
      h.stride = pick(pool_strides, rng);
      h.filter.value = pick(filters, rng);
      h.mapping = pick(pool_mappings, rng);
      return qpool(std::move(h));
    default:
      throw ConfigError("cannot sample a Qfree primitive");
  }
}

void validate(const SearchConfig& cfg) {
  if (cfg.pool_size < 2)
    throw ConfigError("the initial pool needs at least two genotypes");
  if (cfg.pressure <= 0 || cfg.pressure > 1)
    throw ConfigError("selection pressure must lie in (0, 1]");
  if (cfg.qubits < 1) throw ConfigError("task qubit count must be positive");
  if (cfg.generations < 0) throw ConfigError("generation count must be non-negative");
  validate(cfg.weights);
}

std::vector<Genotype> init_population(const SearchConfig& cfg,
                                      std::mt19937_64& rng) {
  validate(cfg);
  std::vector<Genotype> pool;
  pool.reserve(cfg.pool_size);
  const Motif head = qfree(cfg.qubits);
  for (int i = 0; i < cfg.pool_size; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000)
        throw ConfigError("could not sample a resolving primitive; check the sampler");
      Motif candidate = head + cfg.init_sampler.sample(rng);
      if (!resolves(candidate.flatten())) continue;
      Genotype g;
      g.motif = std::move(candidate);
      g.op = "init";
      pool.push_back(std::move(g));
      break;
    }
  }
  return pool;
}

std::pair<long, long> tournament_select(const MemoryTable& table,
                                        double pressure, std::mt19937_64& rng) {
  std::vector<long> evaluated;
  for (const auto& g : table.rows())
    if (g.fitness) evaluated.push_back(g.id);
  if (evaluated.size() < 2)
    throw ConfigError("tournament selection needs at least two evaluated genotypes");
  size_t k = static_cast<size_t>(
      std::ceil(pressure * static_cast<double>(evaluated.size())));
  k = std::max<size_t>(2, std::min(k, evaluated.size()));
  // Partial Fisher-Yates draw without replacement.
  for (size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<size_t> d(i, evaluated.size() - 1);
    std::swap(evaluated[i], evaluated[d(rng)]);
  }
  evaluated.resize(k);
  std::sort(evaluated.begin(), evaluated.end(), [&table](long a, long b) {
    const double fa = *table.at(a).fitness, fb = *table.at(b).fitness;
    return fa != fb ? fa < fb : a < b;
  });
  return {evaluated[0], evaluated[1]};
}

std::optional<Motif> mutate(const Motif& parent, const SearchConfig& cfg,
                            std::mt19937_64& rng) {
  PrimitiveSequence seq = parent.flatten();
  if (seq.size() < 2 || seq.front().kind != PrimitiveKind::Qfree)
    throw ConfigError("mutation expects a Qfree-led genotype with operations");
  std::uniform_int_distribution<size_t> dpos(1, seq.size() - 1);
  const size_t pos = dpos(rng);
  const Primitive original = seq[pos];
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Motif replacement = cfg.mutation_sampler.sample(rng);
    Primitive fresh{replacement.kind(), replacement.params()};
    if (fresh == original) continue;
    seq[pos] = fresh;
    if (resolves(seq)) return motif_from_sequence(seq);
    seq[pos] = original;
  }
  return std::nullopt;
}

Motif crossover(const Motif& a, const Motif& b) {
  const PrimitiveSequence sa = a.flatten();
  PrimitiveSequence sb = b.flatten();
  if (!sb.empty() && sb.front().kind == PrimitiveKind::Qfree)
    sb.erase(sb.begin());

  PrimitiveSequence joined = sa;
  joined.insert(joined.end(), sb.begin(), sb.end());
  if (resolves(joined)) return motif_from_sequence(joined);

  // Interleave the operational primitives and keep the longest prefix
  // that still resolves.
  PrimitiveSequence ops_a(sa.begin() + 1, sa.end());
  PrimitiveSequence woven;
  woven.push_back(sa.front());
  for (size_t i = 0; i < std::max(ops_a.size(), sb.size()); ++i) {
    if (i < ops_a.size()) woven.push_back(ops_a[i]);
    if (i < sb.size()) woven.push_back(sb[i]);
  }
  for (size_t len = woven.size(); len >= 2; --len) {
    PrimitiveSequence prefix(woven.begin(), woven.begin() + len);
    if (resolves(prefix)) return motif_from_sequence(prefix);
  }
  return a;
}

namespace {

uint64_t mix_seed(uint64_t seed, long id) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class EventLog {
 public:
  explicit EventLog(const std::string& path) {
    if (!path.empty()) {
      out_.open(path, std::ios::app);
      if (!out_) throw ConfigError("cannot open search log: " + path);
    }
  }
  void eval(int gen, const Genotype& g, double wall_ms) {
    if (!out_) return;
    json j{{"kind", "eval"},
           {"gen", gen},
           {"id", g.id},
           {"op", g.op},
           {"parents", g.parents},
           {"fitness", *g.fitness},
           {"n_params", g.n_params},
           {"wall_ms", wall_ms},
           {"motif", g.motif.to_json()}};
    out_ << j.dump() << "\n";
    out_.flush();
  }
  void skip(int gen, const std::string& op, long parent) {
    if (!out_) return;
    json j{{"kind", "skip"}, {"gen", gen}, {"op", op}, {"parent", parent}};
    out_ << j.dump() << "\n";
    out_.flush();
  }

 private:
  std::ofstream out_;
};

double evaluate_genotype(Genotype& g, const FitnessFn& fitness, uint64_t seed) {
  try {
    return fitness(g, seed);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::max();
  }
}

struct SearchState {
  MemoryTable table;
  std::vector<double> best_curve;
  int skipped = 0;
};

void evaluate_and_append(std::vector<Genotype>& batch, SearchState& st,
                         const SearchConfig& cfg, const FitnessFn& fitness,
                         EventLog& log, int gen) {
  // Fitness calls run in parallel; appends stay in batch order so the
  // table is reproducible for a pure fitness function.
  std::vector<double> scores(batch.size());
  std::vector<double> wall(batch.size());
  const long base_id = st.table.size();
  auto eval_one = [&](size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    scores[i] = evaluate_genotype(batch[i], fitness,
                                  mix_seed(cfg.seed, base_id + static_cast<long>(i)));
    wall[i] = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, batch.size()));
  if (workers == 1) {
    for (size_t i = 0; i < batch.size(); ++i) eval_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next++; i < batch.size(); i = next++) eval_one(i);
      });
    for (auto& t : pool) t.join();
  }
  for (size_t i = 0; i < batch.size(); ++i) {
    batch[i].fitness = scores[i];
    const long id = st.table.append(std::move(batch[i]));
    log.eval(gen, st.table.at(id), wall[i]);
    const double prev = st.best_curve.empty()
                            ? std::numeric_limits<double>::max()
                            : st.best_curve.back();
    st.best_curve.push_back(std::min(prev, scores[i]));
  }
  batch.clear();
}

SearchResult run_from(SearchState st, int start_gen, const SearchConfig& cfg,
                      const FitnessFn& fitness) {
  validate(cfg);
  EventLog log(cfg.log_path);
  std::mt19937_64 rng(cfg.seed + static_cast<uint64_t>(start_gen));
  const auto t_start = std::chrono::steady_clock::now();

  if (st.table.size() == 0) {
    std::vector<Genotype> pool = init_population(cfg, rng);
    evaluate_and_append(pool, st, cfg, fitness, log, 0);
  }

  int gen = start_gen;
  for (; gen < start_gen + cfg.generations; ++gen) {
    if (cfg.max_seconds > 0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
              .count();
      if (elapsed > cfg.max_seconds) break;
    }
    const auto [id1, id2] = tournament_select(st.table, cfg.pressure, rng);
    std::vector<Genotype> children;
    if (auto mutant = mutate(st.table.at(id1).motif, cfg, rng)) {
      Genotype g;
      g.motif = std::move(*mutant);
      g.op = "mutate";
      g.parents = {id1};
      children.push_back(std::move(g));
    } else {
      ++st.skipped;
      log.skip(gen + 1, "mutate", id1);
    }
    {
      Genotype g;
      g.motif = crossover(st.table.at(id1).motif, st.table.at(id2).motif);
      g.op = "crossover";
      g.parents = {id1, id2};
      children.push_back(std::move(g));
    }
    evaluate_and_append(children, st, cfg, fitness, log, gen + 1);
  }

  SearchResult result;
  result.best_id = st.table.best_id();
  result.table = std::move(st.table);
  result.best_curve = std::move(st.best_curve);
  result.skipped = st.skipped;
  result.generations_run = gen - start_gen;
  return result;
}

}  // namespace

SearchResult run_search(const SearchConfig& cfg, const FitnessFn& fitness) {
  return run_from(SearchState{}, 0, cfg, fitness);
}

SearchResult resume_search(const std::string& log_path, const SearchConfig& cfg,
                           const FitnessFn& fitness) {
  std::ifstream in(log_path);
  if (!in) throw ConfigError("cannot open search log: " + log_path);
  SearchState st;
  int last_gen = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ConfigError("corrupt search log line: " + line);
    last_gen = std::max(last_gen, j.value("gen", 0));
    if (j.at("kind") == "skip") {
      ++st.skipped;
      continue;
    }
    Genotype g;
    g.motif = Motif::from_json(j.at("motif"));
    g.fitness = j.at("fitness").get<double>();
    g.op = j.value("op", "init");
    g.parents = j.value("parents", std::vector<long>{});
    g.n_params = j.value("n_params", -1);
    st.table.append(std::move(g));
    const double prev = st.best_curve.empty()
                            ? std::numeric_limits<double>::max()
                            : st.best_curve.back();
    st.best_curve.push_back(std::min(prev, *st.table.rows().back().fitness));
  }
  if (st.table.size() == 0) throw ConfigError("search log holds no evaluations");
  return run_from(std::move(st), last_gen, cfg, fitness);
}

int genotype_param_count(const Motif& motif, const Registry& registry) {
  return compile(resolve(motif), registry).param_count();
}

FitnessFn make_qpr_fitness(const Registry& registry, const LineSpec& line,
                           const TrainConfig& budget, const FitnessWeights& weights,
                           GroundStateCache* cache, std::vector<RegionTag> regions) {
  validate(weights);
  if (regions.empty()) regions = default_line_regions(line);
  auto shared_cache = std::make_shared<GroundStateCache>();
  GroundStateCache* use_cache = cache ? cache : shared_cache.get();
  return [&registry, line, budget, weights, use_cache, shared_cache,
          regions = std::move(regions)](Genotype& g, uint64_t seed) {
    CircuitProgram prog = compile(resolve(g.motif), registry);
    g.n_params = prog.param_count();
    TrainConfig cfg = budget;
    cfg.seed = seed;
    FitResult fitted = train_line(prog, line, cfg, use_cache);
    LinePoints pts = spt_line(line, use_cache);
    PhaseGrid grid;
    for (size_t i = 0; i < pts.states.size(); ++i) {
      PhasePoint p;
      p.h1 = pts.h1[i];
      p.h2 = line.h2;
      p.expectation =
          expectation_z(run(prog, fitted.params, pts.states[i]), prog.readout);
      p.region = "untagged";
      for (const auto& r : regions)
        if (std::abs(r.h1 - p.h1) < 1e-9 && std::abs(r.h2 - p.h2) < 1e-9)
          p.region = r.tag;
      grid.points.push_back(std::move(p));
    }
    return fitness_score(grid, g.n_params, weights);
  };
}

}  // namespace motiq
