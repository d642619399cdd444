#pragma once

// Composite Hilbert space of one transmon qutrit and K truncated resonators,
// with the elementary ladder/transition operators and the small amount of
// dense linear algebra the simulator needs on top of Eigen.

#include <complex>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cqed {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Level : int { g = 0, e = 1, f = 2 };

inline constexpr int kQutritLevels = 3;

char level_name(Level level);

/// Dimensions of the tensor factors of a (possibly reduced) system, in
/// canonical order. Index 0 is the slowest-varying factor.
using TensorShape = std::vector<int>;

struct BasisLabel {
  Level qutrit = Level::g;
  std::vector<int> photons;

  bool operator==(const BasisLabel&) const = default;
};

std::string to_string(const BasisLabel& label);

/// Ordered product qutrit ⊗ r_1 ⊗ ... ⊗ r_K. Resonator i holds Fock states
/// 0..cutoff(i). Subsystem 0 is the qutrit, subsystem i (1-based) is r_i.
class CompositeSpace {
 public:
  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<int> resonator_cutoffs);

  int resonator_count() const { return static_cast<int>(cutoffs_.size()); }
  int subsystem_count() const { return resonator_count() + 1; }
  int cutoff(int resonator) const;
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  int dimension() const { return dimension_; }
  TensorShape shape() const;

  int index(Level qutrit, std::span<const int> photons) const;
  int index(const BasisLabel& label) const { return index(label.qutrit, label.photons); }
  BasisLabel label(int index) const;

  /// Indices with qutrit in g and every resonator in {0,1}; ordered with r_1 as
  /// the most significant bit (|0..0>, |0..01>, ...).
  std::vector<int> computational_indices(Level qutrit = Level::g) const;

  bool operator==(const CompositeSpace& other) const { return cutoffs_ == other.cutoffs_; }

 private:
  std::vector<int> cutoffs_;
  std::vector<int> strides_;  // stride of each subsystem, qutrit first
  int dimension_ = kQutritLevels;
};

class StateVector {
 public:
  /// Throws ConfigError on dimension mismatch or if the norm differs from 1 by
  /// more than 1e-10.
  StateVector(CompositeSpace space, Vector amplitudes);

  const CompositeSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amplitudes_; }
  cplx amplitude(int index) const { return amplitudes_(index); }
  double norm() const { return amplitudes_.norm(); }

 private:
  CompositeSpace space_;
  Vector amplitudes_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-10), unit trace (1e-10) and eigenvalues >= -1e-9.
  DensityMatrix(TensorShape shape, Matrix rho);

  static DensityMatrix pure(TensorShape shape, const Vector& psi);
  static DensityMatrix pure(const StateVector& psi);

  const TensorShape& shape() const { return shape_; }
  const Matrix& matrix() const { return rho_; }
  int dimension() const { return static_cast<int>(rho_.rows()); }
  cplx trace() const { return rho_.trace(); }

 private:
  TensorShape shape_;
  Matrix rho_;
};

class Operator {
 public:
  /// With hermitian_hint set the matrix must satisfy ||M - M^dag||_max < 1e-12.
  Operator(CompositeSpace space, Matrix matrix, bool hermitian_hint = false);

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  bool hermitian_hint() const { return hermitian_; }

  Operator adjoint() const;
  Operator operator*(const Operator& rhs) const;
  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator scaled(cplx factor) const;
  Vector apply(const Vector& psi) const;

 private:
  CompositeSpace space_;
  Matrix matrix_;
  bool hermitian_ = false;
};

// -- constructors -----------------------------------------------------------

StateVector basis_state(const CompositeSpace& space, Level qutrit, std::span<const int> photons);
inline StateVector basis_state(const CompositeSpace& space, Level qutrit,
                               std::initializer_list<int> photons) {
  std::vector<int> n(photons);
  return basis_state(space, qutrit, std::span<const int>(n));
}

Operator identity(const CompositeSpace& space);
/// Annihilation operator of resonator `resonator` (0-based), identity elsewhere.
Operator annihilation(const CompositeSpace& space, int resonator);
Operator creation(const CompositeSpace& space, int resonator);
Operator number(const CompositeSpace& space, int resonator);
/// |to><from| on the qutrit. Only nearest-neighbour ladder transitions exist.
Operator qutrit_transition(const CompositeSpace& space, Level from, Level to);
Operator qutrit_projector(const CompositeSpace& space, Level level);

// -- algebra ----------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);
Matrix commutator(const Matrix& a, const Matrix& b);

/// <psi|O|psi>. Throws ConfigError on dimension mismatch.
cplx expectation(const Operator& op, const StateVector& psi);
/// Real part of a Hermitian expectation; throws PhysicsError if the imaginary
/// part exceeds 1e-10.
double real_expectation(const Operator& op, const StateVector& psi);

/// Reduced density matrix on the factors listed in `keep` (any order; result
/// keeps canonical order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  std::vector<int> k(keep);
  return partial_trace(rho, std::span<const int>(k));
}

}  // namespace cqed
