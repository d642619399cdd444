#include "cqed/analysis.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cqed/diagnostics.hpp"
#include "cqed/errors.hpp"

namespace cqed {
namespace {

void check_pair(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dimension() != sigma.dimension() || rho.shape() != sigma.shape()) {
    throw ConfigError("fidelity arguments live in different spaces");
  }
}

RealVector clamped_eigenvalues(const RealVector& w) {
  RealVector out = w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) >= 0.0) continue;
    if (w(i) < -1e-9) {
      std::ostringstream os;
      os << "matrix is not positive semidefinite (eigenvalue " << w(i) << ")";
      throw PhysicsError(os.str());
    }
    if (w(i) < -1e-12) {
      std::ostringstream os;
      os << "clamping eigenvalue " << w(i) << " to zero";
      warn(os.str());
    }
    out(i) = 0.0;
  }
  const double floor = 1e-13 * std::max(0.0, w.maxCoeff());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) < floor) out(i) = 0.0;
  }
  return out;
}

}  // namespace

Matrix hermitian_sqrt(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector w = clamped_eigenvalues(es.eigenvalues()).cwiseSqrt();
  return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity_trace_form(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_pair(rho, sigma);
  const Matrix s = hermitian_sqrt(rho.matrix());
  const Matrix m = s * sigma.matrix() * s;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double fidelity_uhlmann(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_pair(rho, sigma);
  const Matrix s = hermitian_sqrt(rho.matrix());
  const Matrix inner = s * sigma.matrix() * s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  const double root_trace = clamped_eigenvalues(es.eigenvalues()).cwiseSqrt().sum();
  return root_trace * root_trace;
}

FidelityPair fidelities(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return {fidelity_trace_form(rho, sigma), fidelity_uhlmann(rho, sigma)};
}

IdealGate IdealGate::controlled_phase(int qubits) {
  if (qubits < 1) throw ConfigError("controlled phase needs at least one qubit");
  const int d = 1 << qubits;
  Matrix m = Matrix::Identity(d, d);
  m(d - 1, d - 1) = -1.0;
  return IdealGate(qubits, std::move(m));
}

Vector uniform_computational(int qubits) {
  const int d = 1 << qubits;
  return Vector::Constant(d, cplx(1.0 / std::sqrt(static_cast<double>(d))));
}

Vector embed_computational(const CompositeSpace& space, const Vector& computational) {
  const std::vector<int> idx = space.computational_indices();
  if (static_cast<int>(idx.size()) != computational.size()) {
    throw ConfigError("computational vector length does not match 2^K");
  }
  Vector v = Vector::Zero(space.dimension());
  for (std::size_t k = 0; k < idx.size(); ++k) v(idx[k]) = computational(static_cast<Eigen::Index>(k));
  return v;
}

double TruthMatrix::max_leakage() const {
  double m = 0.0;
  for (double l : column_leakage) m = std::max(m, l);
  return m;
}

double TruthMatrix::unitarity_deviation() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < matrix.cols(); ++k) m = std::max(m, std::abs(1.0 - matrix.col(k).norm()));
  return m;
}

Matrix computational_action(const Schedule& schedule, const CompositeSpace& space, const EvolutionConfig& cfg) {
  const std::vector<int> idx = space.computational_indices();
  Matrix inputs = Matrix::Zero(space.dimension(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) inputs(idx[k], static_cast<Eigen::Index>(k)) = 1.0;
  return propagate_columns(space, inputs, schedule, cfg);
}

TruthMatrix truth_from_action(const CompositeSpace& space, const Matrix& action) {
  const std::vector<int> idx = space.computational_indices();
  const int d = static_cast<int>(idx.size());
  if (action.rows() != space.dimension() || action.cols() != d) throw ConfigError("action shape mismatch");
  TruthMatrix t;
  t.matrix.resize(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) t.matrix(j, k) = action(idx[j], k);
  }
  const cplx m00 = t.matrix(0, 0);
  if (std::abs(m00) > 0.0) t.matrix *= std::conj(m00) / std::abs(m00);
  t.matrix(0, 0) = cplx(t.matrix(0, 0).real(), 0.0);
  for (int k = 0; k < d; ++k) t.column_leakage.push_back(std::max(0.0, 1.0 - t.matrix.col(k).squaredNorm()));
  return t;
}

TruthMatrix extract_truth_matrix(const Schedule& schedule, const CompositeSpace& space, const EvolutionConfig& cfg) {
  return truth_from_action(space, computational_action(schedule, space, cfg));
}

DensityMatrix reduced_resonator_state(const CompositeSpace& space, const Vector& psi) {
  if (psi.size() != space.dimension()) throw ConfigError("state length does not match the space");
  const Vector unit = psi / psi.norm();
  std::vector<int> keep;
  for (int r = 1; r <= space.resonator_count(); ++r) keep.push_back(r);
  return partial_trace(DensityMatrix::pure(space.shape(), unit), keep);
}

Matrix computational_block(const DensityMatrix& resonators) {
  const TensorShape& shape = resonators.shape();
  const int k = static_cast<int>(shape.size());
  const int d = 1 << k;
  std::vector<int> idx(d);
  for (int bits = 0; bits < d; ++bits) {
    int flat = 0;
    for (int i = 0; i < k; ++i) {
      if (shape[i] < 2) throw ConfigError("computational block needs at least two levels per resonator");
      flat = flat * shape[i] + ((bits >> (k - 1 - i)) & 1);
    }
    idx[bits] = flat;
  }
  Matrix out(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) out(a, b) = resonators.matrix()(idx[a], idx[b]);
  }
  return out;
}

DensityMatrix ideal_resonator_state(const CompositeSpace& space, const Vector& computational) {
  return reduced_resonator_state(space, embed_computational(space, computational));
}

double von_neumann_entropy_bits(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho.matrix() + rho.matrix().adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

double relative_phase(const Matrix& m, int k) { return std::arg(m(k, k) * std::conj(m(0, 0))); }

Table density_table(const Matrix& rho) {
  Table t;
  t.header = {"row", "col", "real", "imag"};
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      t.rows.push_back({static_cast<double>(i), static_cast<double>(j), rho(i, j).real(), rho(i, j).imag()});
    }
  }
  return t;
}

Table trajectory_table(const Trajectory& trajectory) {
  Table t;
  t.header.push_back("time_ns");
  t.header.insert(t.header.end(), trajectory.names.begin(), trajectory.names.end());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    std::vector<double> row{trajectory.times[i]};
    row.insert(row.end(), trajectory.populations[i].begin(), trajectory.populations[i].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace cqed
