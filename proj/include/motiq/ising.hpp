#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "motiq/train.hpp"

namespace motiq {

/// Open-boundary cluster-Ising chain
///   H = -J sum Z X Z  -  h1 sum X  -  h2 sum X X
/// over `sites` spins; spin i maps to qubit label i.
struct ClusterIsingParams {
  int sites = 3;
  double j = 1.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

struct GroundStateOptions {
  /// Deterministic degeneracy splitting: adds tie_break * sum_i Z_i.
  double tie_break = 1e-8;
  double residual_tol = 1e-8;
  int max_lanczos = 200;
  int max_restarts = 15;
};

struct GroundState {
  StateVector state;
  double energy = 0;
};

/// y = H x for the chain above plus the tie-break field; the same
/// operator the ground-state solver iterates.
void apply_cluster_ising(const ClusterIsingParams& params, double tie_break,
                         const Eigen::VectorXd& x, Eigen::VectorXd& y);

/// Lowest eigenpair via matrix-free Lanczos with full
/// reorthogonalization; deterministic start vector, restarted until the
/// residual converges. Throws NumericError on non-convergence.
GroundState ground_state(const ClusterIsingParams& params,
                         const GroundStateOptions& opts = {});

/// Measurements needed for 95% confidence that p differs from 0.5,
/// 1.96^2 / (asin sqrt p - asin sqrt 0.5)^2, capped at m_cap. The
/// literal_form flag evaluates the uncorrected printed expression
/// (diagnostic only).
double sample_complexity(double p, double m_cap = 500.0,
                         bool literal_form = false);

struct PhasePoint {
  double h1 = 0;
  double h2 = 0;
  double expectation = 0;       // <Z> on the readout qubit
  std::string region = "untagged";
};

struct PhaseGrid {
  std::vector<PhasePoint> points;
};

struct RegionTag {
  double h1 = 0;
  double h2 = 0;
  std::string tag;
};

struct GridSpec {
  int sites = 9;
  double j = 1.0;
  double h1_min = 0.0, h1_max = 1.6;
  int h1_steps = 16;
  double h2_min = -1.6, h2_max = 1.6;
  int h2_steps = 16;
};

/// Disk-backed memo of ground states keyed by (sites, J, h1, h2).
class GroundStateCache {
 public:
  explicit GroundStateCache(std::string dir = "");
  StateVector get(const ClusterIsingParams& params,
                  const GroundStateOptions& opts = {});

 private:
  std::string dir_;
  std::mutex mu_;
  std::map<std::string, StateVector> mem_;
};

/// Evaluate the trained circuit on every grid point's ground state.
PhaseGrid phase_diagram(const CircuitProgram& prog, const Eigen::VectorXd& params,
                        const GridSpec& grid,
                        const std::vector<RegionTag>& regions = {},
                        GroundStateCache* cache = nullptr, int workers = 1);

std::vector<RegionTag> load_region_csv(const std::string& path);
void write_phase_csv(const PhaseGrid& grid, const std::string& path);

/// Training line: n equally spaced points along h2 = 0 with label 1
/// (positive class) while h1 <= 1.
struct LineSpec {
  int sites = 9;
  int points = 40;
  double j = 1.0;
  double h1_min = 0.0;
  double h1_max = 2.0;
  double h2 = 0.0;
};

struct LinePoints {
  std::vector<double> h1;
  std::vector<StateVector> states;
  std::vector<int> labels;
};

LinePoints spt_line(const LineSpec& spec, GroundStateCache* cache = nullptr,
                    int workers = 1);

FitResult train_line(const CircuitProgram& prog, const LineSpec& spec,
                     const TrainConfig& cfg, GroundStateCache* cache = nullptr);

/// Region tags for the h2 = 0 line at desk scale: `inside` for labelled
/// points near the boundary (0.5 < h1 <= 1), `middle` deep in the
/// positive phase (h1 <= 0.5), `outside` just past the boundary
/// (1 < h1 <= 1.5); the rest stays untagged.
std::vector<RegionTag> default_line_regions(const LineSpec& spec);

struct FitnessWeights {
  double c1 = 0.7;
  double c2 = 0.05;
  double c3 = 0.25;
  double lambda = 0.0;
  double m_cap = 500.0;
  /// Target <Z> for outside (negative-class) points. The class-1 phase
  /// reads out <Z> = -1 under the P(1) convention, so a correct
  /// classifier pushes outside points to +1.
  double outside_target = 1.0;
};
void validate(const FitnessWeights& w);

/// c1*Min/Mcap + c2*Mmiddle/Mcap + c3*MSEout + lambda*n_params, with the
/// per-point sample complexities capped at m_cap. Lower is better.
/// Throws if any of the three regions has no points.
double fitness_score(const PhaseGrid& grid, int n_params,
                     const FitnessWeights& w);

}  // namespace motiq
