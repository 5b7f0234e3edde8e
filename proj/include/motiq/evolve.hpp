#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "motiq/ising.hpp"

namespace motiq {

struct Genotype {
  Motif motif;
  std::optional<double> fitness;
  long id = -1;
  std::vector<long> parents;
  std::string op = "init";  // init | mutate | crossover
  int n_params = -1;
};

/// Append-only pool; genotypes are never removed or rewritten once their
/// fitness lands.
class MemoryTable {
 public:
  long append(Genotype g);
  const Genotype& at(long id) const { return rows_.at(id); }
  Genotype& at(long id) { return rows_.at(id); }
  long size() const { return static_cast<long>(rows_.size()); }
  const std::vector<Genotype>& rows() const { return rows_; }
  /// Lowest fitness among evaluated rows; ties break toward lower id.
  long best_id() const;

 private:
  std::vector<Genotype> rows_;
};

/// Distributions for freshly generated primitives. The defaults follow
/// the documented sampling scheme: kind uniform over conv/pool/dense,
/// conv stride 1..7, pool stride 0..3, the six named filters, arity 2
/// with weight 0.8 and 3 with 0.2, mappings uniform over the stock
/// ansatzes.
struct PrimitiveSampler {
  std::vector<PrimitiveKind> kinds = {PrimitiveKind::Qconv, PrimitiveKind::Qpool,
                                      PrimitiveKind::Qdense};
  std::vector<int> conv_strides = {1, 2, 3, 4, 5, 6, 7};
  std::vector<int> pool_strides = {0, 1, 2, 3};
  std::vector<std::string> filters = {"even", "inside", "left",
                                      "odd",  "outside", "right"};
  std::vector<int> qpu_values = {2, 3};
  std::vector<double> qpu_weights = {0.8, 0.2};
  std::vector<std::string> conv_mappings = {"u_ttn", "u_9",  "u_15", "u_so4",
                                            "u_13",  "u_14", "u_5",  "u_6"};
  std::vector<std::string> pool_mappings = {"v_pool", "v_cx", "v_crz", "v_crx",
                                            "v_rzrx"};

  Motif sample(std::mt19937_64& rng) const;
};

struct SearchConfig {
  int pool_size = 100;
  double pressure = 0.05;
  uint64_t seed = 0;
  int generations = 100;
  double max_seconds = 0;  // 0 = no wall-clock stop
  int workers = 1;
  int qubits = 8;  // Qfree(N) prefix of every genotype
  PrimitiveSampler init_sampler;
  PrimitiveSampler mutation_sampler;
  int max_retries = 8;
  FitnessWeights weights;
  std::string log_path;  // JSON-lines event log (optional)
};
void validate(const SearchConfig& cfg);

/// Evaluators may fill n_params on the genotype; throwing marks the
/// genotype with the worst possible score and the search continues.
using FitnessFn = std::function<double(Genotype&, uint64_t seed)>;

/// Seeded pool of single-primitive genotypes, each prefixed with
/// Qfree(N); draws that fail to resolve are resampled.
std::vector<Genotype> init_population(const SearchConfig& cfg,
                                      std::mt19937_64& rng);

/// Sample max(2, ceil(pressure * evaluated)) genotypes without
/// replacement and return the ids of the two fittest.
std::pair<long, long> tournament_select(const MemoryTable& table,
                                        double pressure, std::mt19937_64& rng);

/// Replace one flattened primitive (never the leading Qfree) with a
/// fresh draw that differs and still resolves; nullopt after the retry
/// budget runs out.
std::optional<Motif> mutate(const Motif& parent, const SearchConfig& cfg,
                            std::mt19937_64& rng);

/// Tail-to-head combination with the second parent's Qfree dropped;
/// falls back to interleaving the operational primitives and truncating
/// to the longest resolving prefix, and to the first parent if all else
/// fails. The result always resolves.
Motif crossover(const Motif& a, const Motif& b);

struct SearchResult {
  MemoryTable table;
  long best_id = -1;
  std::vector<double> best_curve;  // best-so-far after each evaluation
  int skipped = 0;
  int generations_run = 0;
};

SearchResult run_search(const SearchConfig& cfg, const FitnessFn& fitness);

/// Rebuild the table from an event log and continue for cfg.generations
/// more generations.
SearchResult resume_search(const std::string& log_path, const SearchConfig& cfg,
                           const FitnessFn& fitness);

int genotype_param_count(const Motif& motif, const Registry& registry);

/// Phase-recognition fitness: train the candidate's parameters on the
/// h2 = 0 line, then score sample complexities and outside error on the
/// tagged points.
FitnessFn make_qpr_fitness(const Registry& registry, const LineSpec& line,
                           const TrainConfig& budget, const FitnessWeights& weights,
                           GroundStateCache* cache = nullptr,
                           std::vector<RegionTag> regions = {});

}  // namespace motiq
