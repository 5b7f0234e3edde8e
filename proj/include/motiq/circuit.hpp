#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motiq/graphs.hpp"

namespace motiq {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

enum class RotationAxis { X, Y, Z };

enum class SiteKind { Fixed, Rotation, MatrixExp };

/// One gate application. Rotation sites are single-qubit Pauli rotations
/// whose angle is coeff * theta[group_offset + local]; controlled
/// rotations are decomposed into such sites so the two-term shift rule
/// stays valid. MatrixExp sites exponentiate a Hermitian combination of
/// generalized Gell-Mann generators.
struct GateSite {
  SiteKind kind = SiteKind::Fixed;
  std::vector<int> qubits;   // qubits[0] is the most significant local bit
  std::vector<int> controls; // computational-basis controls (Fixed/MatrixExp)
  Eigen::MatrixXcd matrix;   // Fixed only
  RotationAxis axis = RotationAxis::Z;
  int group = -1;
  int local = 0;
  double coeff = 1.0;
  int exp_local = 0;   // MatrixExp: first parameter within the group
  int exp_params = 0;  // MatrixExp: parameter count consumed
  std::string label;
};

struct ParamGroup {
  std::string mapping;
  int param_count = 0;
  int offset = 0;
};

/// One mapping application over one edge, for structured exports.
struct EdgeBlock {
  std::string mapping;
  int group = -1;
  std::vector<int> qubits;
  size_t first_site = 0;
  size_t last_site = 0;  // half-open
};

struct CircuitProgram {
  int num_qubits = 0;
  std::vector<ParamGroup> groups;
  std::vector<GateSite> sites;
  std::vector<EdgeBlock> blocks;
  int readout = 0;  // internal 0-based
  UnitaryCounts counts;

  int param_count() const;
  int model_unitary_count() const { return counts.total(); }
  /// True when every parameterized site is rotation-generated.
  bool shift_rule_applies() const;
};

/// A named ansatz: arity, parameter count and a generator that emits the
/// gate sites of one application. Pooling mappings treat the first edge
/// member as the measured control.
struct UnitaryMapping {
  std::string name;
  int arity = 2;
  int param_count = 0;
  bool rotation_generated = true;
  bool pooling = false;
  std::function<void(const std::vector<int>&, int, std::vector<GateSite>&)> emit;
  std::function<void(int, int, std::vector<GateSite>&)> emit_single;
};

class Registry {
 public:
  /// The stock table: eight convolution ansatzes (u_ttn, u_9, u_15,
  /// u_so4, u_13, u_14, u_5, u_6), the pooling ansatzes (v_pool, v_cx,
  /// v_crz, v_crx, v_rzrx) and Gell-Mann unitaries u_gm1..u_gm4.
  static Registry defaults();

  bool contains(const std::string& name) const;
  const UnitaryMapping& at(const std::string& name) const;
  void add(UnitaryMapping m);
  /// Register a motif (led by Qfree) as a reusable unitary of that many
  /// qubits; its compiled parameters become one shared set per edge.
  void add_motif_mapping(const std::string& name, const Motif& motif);
  std::vector<std::string> names() const;

 private:
  std::map<std::string, UnitaryMapping> table_;
};

struct CompileOptions {
  bool share_weights = true;
  std::optional<int> readout;  // 1-based label override
};

/// Lower a resolved graph list to a gate program. Convolution edges of
/// one layer share a parameter group; pooling compiles controls to
/// controlled unitaries.
CircuitProgram compile(const std::vector<PrimitiveGraph>& graphs,
                       const Registry& registry, const CompileOptions& = {});

// --- simulation -------------------------------------------------------

StateVector zero_state(int num_qubits);

/// Apply a k-qubit unitary, optionally conditioned on control qubits
/// being |1>. qubits[0] carries the most significant local index bit.
void apply_gate(StateVector& psi, const Eigen::MatrixXcd& u,
                const std::vector<int>& qubits,
                const std::vector<int>& controls = {});

StateVector run(const CircuitProgram& prog, const Eigen::VectorXd& params,
                const StateVector& input);

/// run() with one site's rotation angle shifted by delta (shift rule).
StateVector run_shifted(const CircuitProgram& prog, const Eigen::VectorXd& params,
                        const StateVector& input, size_t site, double delta);

/// P(measuring 1) on the given qubit (internal 0-based).
double readout_probability(const StateVector& psi, int qubit);

/// <Z> on the given qubit; equals 1 - 2 * readout.
double expectation_z(const StateVector& psi, int qubit);

enum class Encoding { Qubit, Iqp, Amplitude };
Encoding encoding_from_string(const std::string& s);
std::string to_string(Encoding e);

/// Data encodings: per-qubit Ry(2x) product states, a depth-two IQP
/// feature map with nearest-neighbour ZZ phases, or normalized
/// zero-padded amplitudes.
StateVector encode(const Eigen::VectorXd& data, Encoding scheme, int num_qubits);

/// Materialize a mapping as a dense matrix on its own qubits.
Eigen::MatrixXcd mapping_unitary(const UnitaryMapping& mapping,
                                 const Eigen::VectorXd& params);

/// Hermitian traceless basis of su(dim), dim*dim - 1 generators.
std::vector<Eigen::MatrixXcd> gellmann_basis(int dim);

/// OpenQASM 2.0 compatible text; registry ansatzes appear as opaque
/// custom gates with bound parameters.
std::string to_qasm(const CircuitProgram& prog, const Eigen::VectorXd& params);

/// CSV dump (index, re, im).
std::string state_to_csv(const StateVector& psi);

}  // namespace motiq
