#pragma once

#include <string>
#include <vector>

#include "cqed/evolve.hpp"
#include "cqed/hilbert.hpp"

namespace cqed {

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in [-1e-9, 0) are clamped to zero (with a warning below
/// -1e-12); anything more negative is a PhysicsError. Eigenvalues below
/// 1e-13 of the largest are treated as zero.
Matrix hermitian_sqrt(const Matrix& m);

/// Tr|√ρ σ √ρ|. Equals Tr(ρσ) for valid density matrices.
double fidelity_trace_form(const DensityMatrix& rho, const DensityMatrix& sigma);
/// (Tr √(√ρ σ √ρ))², the squared Uhlmann fidelity. Symmetric in its arguments.
double fidelity_uhlmann(const DensityMatrix& rho, const DensityMatrix& sigma);

struct FidelityPair {
  double trace_form = 0.0;
  double uhlmann = 0.0;
};
FidelityPair fidelities(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Diagonal ±1 gate on K resonator qubits with −1 only on |1…1>.
class IdealGate {
 public:
  static IdealGate controlled_phase(int qubits);

  int qubits() const { return qubits_; }
  const Matrix& matrix() const { return matrix_; }
  Vector apply(const Vector& computational) const { return matrix_ * computational; }

 private:
  IdealGate(int qubits, Matrix m) : qubits_(qubits), matrix_(std::move(m)) {}
  int qubits_ = 0;
  Matrix matrix_;
};

/// Uniform superposition over the 2^K computational states.
Vector uniform_computational(int qubits);

/// Embeds a 2^K computational vector as a full-space state with qutrit in g.
Vector embed_computational(const CompositeSpace& space, const Vector& computational);

struct TruthMatrix {
  Matrix matrix;                       // M[j,k] = <j, g| U |k, g>, M[0,0] real ≥ 0
  std::vector<double> column_leakage;  // 1 − ‖column‖²

  double max_leakage() const;
  /// max_k |1 − ‖column k‖|.
  double unitarity_deviation() const;
};

/// Full-space output for each computational input (columns ordered as
/// CompositeSpace::computational_indices), in the configured frame.
Matrix computational_action(const Schedule& schedule, const CompositeSpace& space, const EvolutionConfig& cfg);
TruthMatrix truth_from_action(const CompositeSpace& space, const Matrix& action);
TruthMatrix extract_truth_matrix(const Schedule& schedule, const CompositeSpace& space, const EvolutionConfig& cfg);

/// Reduced state of the resonators (qutrit traced out).
DensityMatrix reduced_resonator_state(const CompositeSpace& space, const Vector& psi);

/// Block of a resonator density matrix on the 2^K states with n_i ∈ {0,1},
/// ordered with resonator 1 most significant.
Matrix computational_block(const DensityMatrix& resonators);

/// Resonator-space density matrix of the ideal computational state.
DensityMatrix ideal_resonator_state(const CompositeSpace& space, const Vector& computational);

double von_neumann_entropy_bits(const DensityMatrix& rho);

/// Relative phase arg(M[k,k]/M[0,0]) in (−π, π].
double relative_phase(const Matrix& m, int k);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// row, col, real, imag for every element.
Table density_table(const Matrix& rho);
/// time_ns followed by one column per monitor.
Table trajectory_table(const Trajectory& trajectory);

}  // namespace cqed
