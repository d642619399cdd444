#include "cqed/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cqed/errors.hpp"

namespace cqed {
namespace {

Matrix embed(const CompositeSpace& space, const Matrix& local, int subsystem) {
  const TensorShape shape = space.shape();
  Matrix out = Matrix::Identity(1, 1);
  for (int s = 0; s < static_cast<int>(shape.size()); ++s) {
    out = kron(out, s == subsystem ? local : Matrix::Identity(shape[s], shape[s]));
  }
  return out;
}

int product(const TensorShape& shape) {
  int p = 1;
  for (int d : shape) {
    if (d <= 0) throw ConfigError("tensor factor dimension must be positive");
    p *= d;
  }
  return p;
}

void check_resonator(const CompositeSpace& space, int resonator) {
  if (resonator < 0 || resonator >= space.resonator_count()) {
    throw ConfigError("resonator index " + std::to_string(resonator) + " out of range [0, " +
                      std::to_string(space.resonator_count()) + ")");
  }
}

}  // namespace

char level_name(Level level) {
  switch (level) {
    case Level::g: return 'g';
    case Level::e: return 'e';
    case Level::f: return 'f';
  }
  return '?';
}

std::string to_string(const BasisLabel& label) {
  std::ostringstream os;
  os << level_name(label.qutrit);
  for (int n : label.photons) os << '_' << n;
  return os.str();
}

CompositeSpace::CompositeSpace(std::vector<int> resonator_cutoffs) : cutoffs_(std::move(resonator_cutoffs)) {
  for (int c : cutoffs_) {
    if (c < 1) throw ConfigError("resonator cutoff must be >= 1, got " + std::to_string(c));
  }
  const TensorShape dims = shape();
  strides_.assign(dims.size(), 1);
  for (int s = static_cast<int>(dims.size()) - 2; s >= 0; --s) strides_[s] = strides_[s + 1] * dims[s + 1];
  dimension_ = product(dims);
}

int CompositeSpace::cutoff(int resonator) const {
  check_resonator(*this, resonator);
  return cutoffs_[resonator];
}

TensorShape CompositeSpace::shape() const {
  TensorShape dims{kQutritLevels};
  for (int c : cutoffs_) dims.push_back(c + 1);
  return dims;
}

int CompositeSpace::index(Level qutrit, std::span<const int> photons) const {
  if (static_cast<int>(photons.size()) != resonator_count()) {
    throw ConfigError("expected " + std::to_string(resonator_count()) + " photon numbers, got " +
                      std::to_string(photons.size()));
  }
  const int q = static_cast<int>(qutrit);
  if (q < 0 || q >= kQutritLevels) throw ConfigError("invalid qutrit level");
  int idx = q * (strides_.empty() ? 1 : strides_[0]);
  for (int i = 0; i < resonator_count(); ++i) {
    if (photons[i] < 0 || photons[i] > cutoffs_[i]) {
      throw ConfigError("photon number " + std::to_string(photons[i]) + " of resonator " + std::to_string(i + 1) +
                        " outside [0, " + std::to_string(cutoffs_[i]) + "]");
    }
    idx += photons[i] * strides_[i + 1];
  }
  return idx;
}

BasisLabel CompositeSpace::label(int index) const {
  if (index < 0 || index >= dimension_) throw ConfigError("basis index out of range");
  BasisLabel out;
  out.qutrit = static_cast<Level>(index / strides_[0]);
  int rest = index % strides_[0];
  for (int i = 0; i < resonator_count(); ++i) {
    out.photons.push_back(rest / strides_[i + 1]);
    rest %= strides_[i + 1];
  }
  return out;
}

std::vector<int> CompositeSpace::computational_indices(Level qutrit) const {
  const int k = resonator_count();
  std::vector<int> out;
  std::vector<int> n(k);
  for (int bits = 0; bits < (1 << k); ++bits) {
    for (int i = 0; i < k; ++i) n[i] = (bits >> (k - 1 - i)) & 1;
    out.push_back(index(qutrit, n));
  }
  return out;
}

StateVector::StateVector(CompositeSpace space, Vector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.dimension()) {
    throw ConfigError("state length " + std::to_string(amplitudes_.size()) + " does not match dimension " +
                      std::to_string(space_.dimension()));
  }
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-10) {
    throw ConfigError("state vector is not normalised (norm " + std::to_string(amplitudes_.norm()) + ")");
  }
}

DensityMatrix::DensityMatrix(TensorShape shape, Matrix rho) : shape_(std::move(shape)), rho_(std::move(rho)) {
  const int dim = product(shape_);
  if (rho_.rows() != dim || rho_.cols() != dim) throw ConfigError("density matrix does not match tensor shape");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ConfigError("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - cplx(1.0)) > 1e-10) throw ConfigError("density matrix trace differs from 1");
  const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw ConfigError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(TensorShape shape, const Vector& psi) {
  Matrix rho = psi * psi.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(shape), std::move(rho));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) { return pure(psi.space().shape(), psi.amplitudes()); }

Operator::Operator(CompositeSpace space, Matrix matrix, bool hermitian_hint)
    : space_(std::move(space)), matrix_(std::move(matrix)), hermitian_(hermitian_hint) {
  if (matrix_.rows() != space_.dimension() || matrix_.cols() != space_.dimension()) {
    throw ConfigError("operator shape does not match space dimension");
  }
  if (hermitian_ && (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() >= 1e-12) {
    throw ConfigError("operator flagged Hermitian is not Hermitian");
  }
}

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint(), hermitian_); }

Operator Operator::operator*(const Operator& rhs) const {
  if (!(space_ == rhs.space_)) throw ConfigError("operator spaces differ");
  return Operator(space_, matrix_ * rhs.matrix_);
}

Operator Operator::operator+(const Operator& rhs) const {
  if (!(space_ == rhs.space_)) throw ConfigError("operator spaces differ");
  return Operator(space_, matrix_ + rhs.matrix_, hermitian_ && rhs.hermitian_);
}

Operator Operator::operator-(const Operator& rhs) const {
  if (!(space_ == rhs.space_)) throw ConfigError("operator spaces differ");
  return Operator(space_, matrix_ - rhs.matrix_, hermitian_ && rhs.hermitian_);
}

Operator Operator::scaled(cplx factor) const {
  return Operator(space_, factor * matrix_, hermitian_ && factor.imag() == 0.0);
}

Vector Operator::apply(const Vector& psi) const {
  if (psi.size() != matrix_.cols()) throw ConfigError("vector length does not match operator");
  return matrix_ * psi;
}

StateVector basis_state(const CompositeSpace& space, Level qutrit, std::span<const int> photons) {
  Vector v = Vector::Zero(space.dimension());
  v(space.index(qutrit, photons)) = 1.0;
  return StateVector(space, std::move(v));
}

Operator identity(const CompositeSpace& space) {
  return Operator(space, Matrix::Identity(space.dimension(), space.dimension()), true);
}

Operator annihilation(const CompositeSpace& space, int resonator) {
  check_resonator(space, resonator);
  const int d = space.cutoffs()[resonator] + 1;
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(space, embed(space, a, resonator + 1));
}

Operator creation(const CompositeSpace& space, int resonator) { return annihilation(space, resonator).adjoint(); }

Operator number(const CompositeSpace& space, int resonator) {
  check_resonator(space, resonator);
  const int d = space.cutoffs()[resonator] + 1;
  Matrix n = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return Operator(space, embed(space, n, resonator + 1), true);
}

Operator qutrit_transition(const CompositeSpace& space, Level from, Level to) {
  const int a = static_cast<int>(from);
  const int b = static_cast<int>(to);
  if (std::abs(a - b) != 1) {
    throw PhysicsError(std::string("unsupported qutrit transition ") + level_name(from) + "->" + level_name(to));
  }
  Matrix s = Matrix::Zero(kQutritLevels, kQutritLevels);
  s(b, a) = 1.0;
  return Operator(space, embed(space, s, 0));
}

Operator qutrit_projector(const CompositeSpace& space, Level level) {
  Matrix p = Matrix::Zero(kQutritLevels, kQutritLevels);
  p(static_cast<int>(level), static_cast<int>(level)) = 1.0;
  return Operator(space, embed(space, p, 0), true);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

cplx expectation(const Operator& op, const StateVector& psi) {
  if (!(op.space() == psi.space())) throw ConfigError("operator and state live in different spaces");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

double real_expectation(const Operator& op, const StateVector& psi) {
  const cplx v = expectation(op, psi);
  if (std::abs(v.imag()) > 1e-10) throw PhysicsError("expectation value has a non-negligible imaginary part");
  return v.real();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const TensorShape& shape = rho.shape();
  const int factors = static_cast<int>(shape.size());
  if (keep.empty()) throw ConfigError("partial trace needs at least one kept subsystem");
  std::vector<bool> kept(factors, false);
  for (int k : keep) {
    if (k < 0 || k >= factors) throw ConfigError("subsystem index " + std::to_string(k) + " out of range");
    if (kept[k]) throw ConfigError("subsystem index " + std::to_string(k) + " listed twice");
    kept[k] = true;
  }
  TensorShape kept_shape;
  for (int s = 0; s < factors; ++s) {
    if (kept[s]) kept_shape.push_back(shape[s]);
  }
  const int dim = rho.dimension();
  std::vector<int> kept_index(dim);
  std::vector<int> traced_index(dim);
  for (int i = 0; i < dim; ++i) {
    int rest = i;
    int stride = dim;
    int kidx = 0;
    int tidx = 0;
    for (int s = 0; s < factors; ++s) {
      stride /= shape[s];
      const int digit = rest / stride;
      rest %= stride;
      if (kept[s]) {
        kidx = kidx * shape[s] + digit;
      } else {
        tidx = tidx * shape[s] + digit;
      }
    }
    kept_index[i] = kidx;
    traced_index[i] = tidx;
  }
  const int rdim = product(kept_shape);
  Matrix red = Matrix::Zero(rdim, rdim);
  const Matrix& m = rho.matrix();
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (traced_index[i] == traced_index[j]) red(kept_index[i], kept_index[j]) += m(i, j);
    }
  }
  red = 0.5 * (red + red.adjoint()).eval();
  return DensityMatrix(std::move(kept_shape), std::move(red));
}

}  // namespace cqed
