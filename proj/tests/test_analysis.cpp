#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cqed/analysis.hpp"
#include "cqed/diagnostics.hpp"
#include "cqed/errors.hpp"

using namespace cqed;

namespace {

Vector random_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n;
  Vector v(dim);
  for (auto& c : v) c = cplx(n(rng), n(rng));
  return v.normalized();
}

Matrix random_density(std::mt19937_64& rng, int dim, int rank) {
  std::normal_distribution<double> n;
  Matrix a(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = cplx(n(rng), n(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

// (Σ √λ)² with λ the eigenvalues of the non-Hermitian product ρσ.
double product_spectrum_fidelity(const Matrix& rho, const Matrix& sigma) {
  const Eigen::ComplexEigenSolver<Matrix> es(rho * sigma);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  return s * s;
}

SystemParams two_resonators() {
  SystemParams p;
  p.omega_ge = 8.7;
  p.omega_ef = 8.0;
  p.omega_r = {7.5, 8.7};
  p.g_ge = {0.2, 0.2};
  p.g_ef = {0.2, 0.2};
  p.coupling_on = {false, false};
  return p;
}

class WarningCapture {
 public:
  WarningCapture() {
    previous_ = set_warning_sink([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_sink(previous_); }
  std::vector<std::string> messages;

 private:
  WarningSink previous_;
};

}  // namespace

TEST(Fidelity, PureStateWithItself) {
  std::mt19937_64 rng(2);
  const DensityMatrix rho = DensityMatrix::pure({6}, random_vector(rng, 6));
  EXPECT_NEAR(fidelity_trace_form(rho, rho), 1.0, 1e-12);
  EXPECT_NEAR(fidelity_uhlmann(rho, rho), 1.0, 1e-9);
}

TEST(Fidelity, OrthogonalPureStatesVanish) {
  const DensityMatrix a = DensityMatrix::pure({4}, Vector::Unit(4, 0));
  const DensityMatrix b = DensityMatrix::pure({4}, Vector::Unit(4, 3));
  EXPECT_NEAR(fidelity_trace_form(a, b), 0.0, 1e-14);
  EXPECT_NEAR(fidelity_uhlmann(a, b), 0.0, 1e-12);
}

TEST(Fidelity, PureStatesMatchDirectOverlap) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 7;
    const Vector psi = random_vector(rng, dim);
    const Vector phi = random_vector(rng, dim);
    const double overlap = std::norm(psi.dot(phi));
    const FidelityPair f = fidelities(DensityMatrix::pure({dim}, psi), DensityMatrix::pure({dim}, phi));
    EXPECT_NEAR(f.trace_form, overlap, 1e-10);
    EXPECT_NEAR(f.uhlmann, overlap, 1e-9);
  }
}

TEST(Fidelity, FormsAgreeWhenOneArgumentIsPure) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix pure = DensityMatrix::pure({5}, random_vector(rng, 5));
    const DensityMatrix mixed({5}, random_density(rng, 5, 1 + trial % 5));
    const FidelityPair a = fidelities(pure, mixed);
    const FidelityPair b = fidelities(mixed, pure);
    EXPECT_NEAR(a.trace_form, a.uhlmann, 1e-9);
    EXPECT_NEAR(b.trace_form, b.uhlmann, 1e-9);
  }
}

TEST(Fidelity, UhlmannSymmetricAndMatchesSpectrumOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix r = random_density(rng, 4, 1 + trial % 4);
    const Matrix s = random_density(rng, 4, 1 + (trial / 4) % 4);
    const DensityMatrix rho({4}, r);
    const DensityMatrix sigma({4}, s);
    const double f = fidelity_uhlmann(rho, sigma);
    EXPECT_NEAR(f, fidelity_uhlmann(sigma, rho), 1e-9);
    EXPECT_NEAR(f, product_spectrum_fidelity(r, s), 1e-7);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0 + 1e-9);
  }
}

TEST(Fidelity, TraceFormEqualsOverlapTrace) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix r = random_density(rng, 4, 2);
    const Matrix s = random_density(rng, 4, 3);
    EXPECT_NEAR(fidelity_trace_form(DensityMatrix({4}, r), DensityMatrix({4}, s)), (r * s).trace().real(), 1e-10);
  }
}

TEST(HermitianSqrt, SquaresBack) {
  std::mt19937_64 rng(16);
  const Matrix r = random_density(rng, 6, 6);
  const Matrix q = hermitian_sqrt(r);
  EXPECT_LT((q * q - r).norm(), 1e-12);
  EXPECT_LT((q - q.adjoint()).norm(), 1e-14);
}

TEST(HermitianSqrt, ClampsSmallNegativeEigenvalues) {
  WarningCapture capture;
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.6;
  m(1, 1) = 0.4;
  m(2, 2) = -1e-10;
  const Matrix q = hermitian_sqrt(m);
  EXPECT_EQ(q(2, 2), cplx(0.0));
  EXPECT_EQ(capture.messages.size(), 1u);
  m(2, 2) = -1e-13;
  hermitian_sqrt(m);
  EXPECT_EQ(capture.messages.size(), 1u);
  m(2, 2) = -1e-8;
  EXPECT_THROW(hermitian_sqrt(m), PhysicsError);
}

TEST(IdealGate, ControlledPhaseStructure) {
  for (int k : {2, 3}) {
    const IdealGate gate = IdealGate::controlled_phase(k);
    const Matrix& m = gate.matrix();
    const int d = 1 << k;
    ASSERT_EQ(m.rows(), d);
    EXPECT_LT((m * m.adjoint() - Matrix::Identity(d, d)).norm(), 1e-15);
    int minus = 0;
    for (int i = 0; i < d; ++i) {
      EXPECT_TRUE(m(i, i) == cplx(1.0) || m(i, i) == cplx(-1.0));
      if (m(i, i) == cplx(-1.0)) ++minus;
    }
    EXPECT_EQ(minus, 1);
    EXPECT_EQ(m(d - 1, d - 1), cplx(-1.0));
  }
}

TEST(TruthMatrix, EmptyScheduleIsIdentity) {
  const CompositeSpace s({3, 3});
  const TruthMatrix t = extract_truth_matrix(Schedule{}, s, EvolutionConfig{});
  EXPECT_LT((t.matrix - Matrix::Identity(4, 4)).norm(), 1e-15);
  EXPECT_LT(t.max_leakage(), 1e-15);
}

TEST(TruthMatrix, IdleScheduleIsIdentity) {
  const CompositeSpace s({2, 2});
  Schedule sched;
  Segment seg;
  seg.duration = 12.0;
  seg.params = two_resonators();
  seg.label = "wait";
  sched.append(seg);
  const TruthMatrix t = extract_truth_matrix(sched, s, EvolutionConfig{});
  EXPECT_LT((t.matrix - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TruthMatrix, GaugeAndColumnLeakage) {
  const CompositeSpace s({2, 2});
  const auto comp = s.computational_indices();
  Matrix action = Matrix::Zero(s.dimension(), 4);
  const cplx phase = std::exp(cplx(0.0, 0.7));
  for (int k = 0; k < 4; ++k) action(comp[k], k) = phase;
  // Column 2 loses 10% of its weight to |e,0,0>.
  action(comp[2], 2) = phase * std::sqrt(0.9);
  action(s.index(Level::e, std::vector<int>{0, 0}), 2) = std::sqrt(0.1);
  const TruthMatrix t = truth_from_action(s, action);
  EXPECT_NEAR(t.matrix(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(t.matrix(0, 0).imag(), 0.0, 1e-15);
  EXPECT_NEAR(t.column_leakage[2], 0.1, 1e-14);
  for (int k : {0, 1, 3}) EXPECT_NEAR(t.column_leakage[k], 0.0, 1e-14);
  for (double l : t.column_leakage) EXPECT_GE(l, -1e-14);
  EXPECT_NEAR(t.max_leakage(), 0.1, 1e-14);
  EXPECT_NEAR(t.unitarity_deviation(), 1.0 - std::sqrt(0.9), 1e-14);
}

TEST(TruthMatrix, ScheduleThenReverseIsIdentity) {
  const CompositeSpace s({3, 3});
  SystemParams rot = two_resonators();
  rot.coupling_on = {true, false};
  SystemParams swap = two_resonators();
  swap.coupling_on = {false, true};
  Schedule fwd;
  Segment a;
  a.duration = 1.25;
  a.params = swap;
  a.label = "swap";
  fwd.append(a);
  Segment b;
  b.duration = 20.0;
  b.params = rot;
  b.drive = DriveParams{0.005, 8.043, Transition::ef, 0.0, true};
  b.switching = Switching::adiabatic;
  b.label = "rot";
  fwd.append(b);
  fwd.append(a);
  const Schedule round = concatenate(fwd, time_reversed(fwd));
  const TruthMatrix t = extract_truth_matrix(round, s, EvolutionConfig{});
  EXPECT_LT((t.matrix - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ResonatorStates, UniformInputHasQuarterElements) {
  const CompositeSpace s({3, 3});
  const Vector psi = embed_computational(s, uniform_computational(2));
  const Matrix block = computational_block(reduced_resonator_state(s, psi));
  ASSERT_EQ(block.rows(), 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(block(i, j) - cplx(0.25)), 0.0, 1e-15);
}

TEST(ResonatorStates, IdealFinalSignPattern) {
  const CompositeSpace s({3, 3});
  const Vector out = IdealGate::controlled_phase(2).apply(uniform_computational(2));
  const Matrix block = computational_block(ideal_resonator_state(s, out));
  const double signs[4] = {1, 1, 1, -1};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(block(i, j).real(), 0.25 * signs[i] * signs[j], 1e-15);
      EXPECT_EQ(block(i, j).imag(), 0.0);
    }
}

TEST(ResonatorStates, EntropyOfProductAndEntangledStates) {
  const CompositeSpace s({1, 1});
  const Vector product = embed_computational(s, uniform_computational(2));
  EXPECT_NEAR(von_neumann_entropy_bits(reduced_resonator_state(s, product)), 0.0, 1e-12);
  // Qutrit entangled with r1: (|g,0,0> + |e,1,0>)/√2 leaves one bit.
  Vector v = Vector::Zero(s.dimension());
  v(s.index(Level::g, std::vector<int>{0, 0})) = 1.0 / std::sqrt(2.0);
  v(s.index(Level::e, std::vector<int>{1, 0})) = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(von_neumann_entropy_bits(reduced_resonator_state(s, v)), 1.0, 1e-12);
}

TEST(RelativePhase, ReadsDiagonalPhase) {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1.0;
  m(1, 1) = std::exp(cplx(0.0, 0.3));
  EXPECT_NEAR(std::abs(relative_phase(m, 3)), M_PI, 1e-15);
  EXPECT_NEAR(relative_phase(m, 1), 0.3, 1e-15);
}

TEST(Tables, DensityAndTrajectoryExports) {
  const Table d = density_table(Matrix::Identity(4, 4) * 0.25);
  EXPECT_EQ(d.header, (std::vector<std::string>{"row", "col", "real", "imag"}));
  EXPECT_EQ(d.rows.size(), 16u);
  Trajectory tr;
  tr.names = {"a", "b"};
  for (int k = 0; k < 5; ++k) {
    tr.times.push_back(0.1 * k);
    tr.populations.push_back({0.5, 0.5});
  }
  const Table t = trajectory_table(tr);
  EXPECT_EQ(t.header, (std::vector<std::string>{"time_ns", "a", "b"}));
  EXPECT_EQ(t.rows.size(), sample_count(0.4, 0.1));
}
