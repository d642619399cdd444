#include "cqed/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cqed/errors.hpp"

namespace cqed {
namespace {

void check_space(const SystemParams& params, const CompositeSpace& space) {
  if (params.resonator_count() != space.resonator_count()) {
    throw ConfigError("parameter set describes " + std::to_string(params.resonator_count()) +
                      " resonators but the space has " + std::to_string(space.resonator_count()));
  }
}

void check_resonator(const SystemParams& params, int r) {
  if (r < 0 || r >= params.resonator_count()) throw ConfigError("resonator index out of range");
}

double nonzero_detuning(double delta, const char* what) {
  if (delta == 0.0) throw PhysicsError(std::string("degenerate detuning: ") + what + " is zero");
  return delta;
}

// Bare indices grouped into blocks that the Hamiltonian does not connect.
std::vector<std::vector<int>> connected_blocks(const Matrix& h) {
  const int n = static_cast<int>(h.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (h(i, j) != cplx(0.0)) {
        const int a = find(i);
        const int b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<int>> blocks;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

// Rotates a degenerate eigenspace (columns of v) onto the bare vectors that
// carry the most weight in it.
Matrix align_cluster(const Matrix& v) {
  const int m = static_cast<int>(v.cols());
  std::vector<int> order(v.rows());
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd weight = v.rowwise().squaredNorm();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return weight(a) > weight(b); });
  std::vector<int> chosen(order.begin(), order.begin() + m);
  std::sort(chosen.begin(), chosen.end());
  Matrix a(m, m);
  for (int r = 0; r < m; ++r) a.row(r) = v.row(chosen[r]);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return v * (svd.matrixV() * svd.matrixU().adjoint());
}

}  // namespace

std::string to_string(Transition t) { return t == Transition::ge ? "ge" : "ef"; }

void SystemParams::validate() const {
  const auto k = omega_r.size();
  if (g_ge.size() != k || g_ef.size() != k || coupling_on.size() != k) {
    throw ConfigError("per-resonator lists omega_r, g_ge, g_ef, coupling_on must have equal length");
  }
  if (!(omega_ge > 0.0) || !(omega_ef > 0.0)) throw ConfigError("qutrit transition frequencies must be positive");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(omega_r[i] > 0.0)) throw ConfigError("resonator " + std::to_string(i + 1) + " frequency must be positive");
    if (!(g_ge[i] >= 0.0) || !(g_ef[i] >= 0.0)) {
      throw ConfigError("resonator " + std::to_string(i + 1) + " couplings must be non-negative");
    }
  }
}

std::vector<std::string> SystemParams::dispersive_warnings() const {
  std::vector<std::string> out;
  auto check = [&](int i, double g, double delta, const char* which) {
    if (g == 0.0) return;
    const double ratio = delta == 0.0 ? INFINITY : (g / delta) * (g / delta);
    if (ratio > 0.1) {
      std::ostringstream os;
      os << "resonator " << i + 1 << ' ' << which << " coupling has (g/delta)^2 = " << ratio << " > 0.1";
      out.push_back(os.str());
    }
  };
  for (int i = 0; i < resonator_count(); ++i) {
    if (!coupling_on[i]) continue;
    check(i, g_ge[i], omega_ge - omega_r[i], "g-e");
    check(i, g_ef[i], omega_ef - omega_r[i], "e-f");
  }
  return out;
}

SystemParams SystemParams::with_couplings(std::vector<bool> on) const {
  if (static_cast<int>(on.size()) != resonator_count()) throw ConfigError("coupling flag count mismatch");
  SystemParams p = *this;
  p.coupling_on = std::move(on);
  return p;
}

SystemParams SystemParams::with_resonator_frequency(int resonator, double ghz) const {
  check_resonator(*this, resonator);
  SystemParams p = *this;
  p.omega_r[resonator] = ghz;
  return p;
}

void DriveParams::validate() const {
  if (!(amplitude >= 0.0)) throw ConfigError("drive amplitude must be non-negative");
  if (active && !(frequency > 0.0)) throw ConfigError("active drive needs a positive frequency");
}

RealVector bare_energies(const SystemParams& params, const CompositeSpace& space) {
  params.validate();
  check_space(params, space);
  const double level_energy[kQutritLevels] = {0.0, angular(params.omega_ge),
                                              angular(params.omega_ge + params.omega_ef)};
  RealVector e(space.dimension());
  for (int i = 0; i < space.dimension(); ++i) {
    const BasisLabel l = space.label(i);
    double v = level_energy[static_cast<int>(l.qutrit)] + angular(params.energy_offset);
    for (int r = 0; r < space.resonator_count(); ++r) v += angular(params.omega_r[r]) * l.photons[r];
    e(i) = v;
  }
  return e;
}

Operator build_static(const SystemParams& params, const CompositeSpace& space) {
  Matrix h = bare_energies(params, space).cast<cplx>().asDiagonal();
  const Matrix sm_ge = qutrit_transition(space, Level::e, Level::g).matrix();
  const Matrix sm_ef = qutrit_transition(space, Level::f, Level::e).matrix();
  for (int r = 0; r < space.resonator_count(); ++r) {
    if (!params.coupling_on[r]) continue;
    const Matrix ad = creation(space, r).matrix();
    const Matrix t = angular(params.g_ge[r]) * (ad * sm_ge) + angular(params.g_ef[r]) * (ad * sm_ef);
    h += t + t.adjoint();
  }
  return Operator(space, std::move(h), true);
}

RealVector excitation_diagonal(const CompositeSpace& space) {
  RealVector n(space.dimension());
  for (int i = 0; i < space.dimension(); ++i) {
    const BasisLabel l = space.label(i);
    n(i) = static_cast<int>(l.qutrit) + std::accumulate(l.photons.begin(), l.photons.end(), 0);
  }
  return n;
}

Operator excitation_number(const CompositeSpace& space) {
  return Operator(space, excitation_diagonal(space).cast<cplx>().asDiagonal(), true);
}

Operator drive_raising(const CompositeSpace& space, Transition transition) {
  return transition == Transition::ge ? qutrit_transition(space, Level::g, Level::e)
                                      : qutrit_transition(space, Level::e, Level::f);
}

std::function<Matrix(double)> build_drive(const DriveParams& drive, const CompositeSpace& space) {
  drive.validate();
  if (!drive.active) throw ConfigError("build_drive called for an inactive drive");
  const Matrix sp = drive_raising(space, drive.transition).matrix();
  const double omega = angular(drive.amplitude);
  const double wd = angular(drive.frequency);
  const double phase = drive.phase;
  return [sp, omega, wd, phase](double t) -> Matrix {
    const Matrix up = omega * std::exp(cplx(0.0, -(wd * t + phase))) * sp;
    return up + up.adjoint();
  };
}

double dispersive_shift_two_level(double g, double delta, int n) {
  nonzero_detuning(delta, "qubit-resonator detuning");
  if (std::abs(g / delta) >= 1.0) throw PhysicsError("dispersive shift requires |g/delta| < 1");
  if (n < 0) throw ConfigError("photon number must be non-negative");
  return g * g / delta * (2 * n + 1);
}

Matrix build_two_level_jc(double omega_q, double omega_r, double g, int cutoff) {
  if (cutoff < 1) throw ConfigError("cutoff must be >= 1");
  const int d = cutoff + 1;
  Matrix h = Matrix::Zero(2 * d, 2 * d);
  for (int n = 0; n < d; ++n) {
    h(n, n) = angular(omega_r) * n;
    h(d + n, d + n) = angular(omega_q) + angular(omega_r) * n;
  }
  for (int n = 0; n + 1 < d; ++n) {
    // a† σ⁻ : |e,n> → √(n+1)|g,n+1>
    h(n + 1, d + n) = angular(g) * std::sqrt(n + 1.0);
    h(d + n, n + 1) = std::conj(h(n + 1, d + n));
  }
  return h;
}

double exact_two_level_shift(double omega_q, double omega_r, double g, int n, int cutoff) {
  if (n < 0 || cutoff < n + 1) throw ConfigError("exact shift needs cutoff >= n + 1");
  const Matrix h = build_two_level_jc(omega_q, omega_r, g, cutoff);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const int d = cutoff + 1;
  const Matrix& v = es.eigenvectors();
  auto dressed_energy = [&](int bare) {
    Eigen::Index best = 0;
    v.row(bare).cwiseAbs2().maxCoeff(&best);
    if (std::norm(v(bare, best)) < 0.5) throw PhysicsError("two-level dressing is ambiguous");
    return es.eigenvalues()(best);
  };
  return (dressed_energy(d + n) - dressed_energy(n)) / kTwoPi - omega_q;
}

DispersiveCheck check_dispersive_shift(double g, double delta, int n, int cutoff) {
  DispersiveCheck c;
  c.perturbative = dispersive_shift_two_level(g, delta, n);
  // Absolute frequencies do not enter the shift; place the resonator at a
  // fixed reference so that only delta matters.
  const double omega_r = 5.0;
  c.exact = exact_two_level_shift(omega_r + delta, omega_r, g, n, cutoff);
  c.relative_error = std::abs(c.exact - c.perturbative) / std::abs(c.perturbative);
  c.bound = 3.0 * (g / delta) * (g / delta);
  return c;
}

int cc_group_index(int n1, int n2) { return 2 * n1 + 6 * n2; }

double cc_shift(const SystemParams& params, int n1, int n2, int ra, int rb) {
  check_resonator(params, ra);
  check_resonator(params, rb);
  const double da = nonzero_detuning(params.omega_ef - params.omega_r[ra], "e-f detuning of the first resonator");
  const double db = nonzero_detuning(params.omega_ef - params.omega_r[rb], "e-f detuning of the second resonator");
  const double ga = params.g_ef[ra];
  const double gb = params.g_ef[rb];
  return params.omega_ef + ga * ga / da * (2 * n1 + 1) + gb * gb / db * (2 * n2 + 1);
}

double ratio_condition_residual(const SystemParams& params, int ra, int rb) {
  check_resonator(params, ra);
  check_resonator(params, rb);
  const double da = nonzero_detuning(params.omega_ef - params.omega_r[ra], "e-f detuning of the first resonator");
  const double db = nonzero_detuning(params.omega_ef - params.omega_r[rb], "e-f detuning of the second resonator");
  const double lhs = 3.0 * params.g_ef[ra] * params.g_ef[ra] / da;
  const double rhs = params.g_ef[rb] * params.g_ef[rb] / db;
  if (rhs == 0.0) throw PhysicsError("ratio condition undefined for a zero second coupling");
  return std::abs(lhs - rhs) / std::abs(rhs);
}

DressedBasis dressed_basis(const SystemParams& params, const CompositeSpace& space, std::span<const int> relevant) {
  const Matrix h = build_static(params, space).matrix();
  const int dim = space.dimension();
  Matrix vectors = Matrix::Zero(dim, dim);
  RealVector values(dim);
  int next = 0;
  for (const auto& block : connected_blocks(h)) {
    const int m = static_cast<int>(block.size());
    Matrix sub(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) sub(i, j) = h(block[i], block[j]);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
    Matrix v = es.eigenvectors();
    const RealVector& w = es.eigenvalues();
    const double scale = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
    for (int start = 0; start < m;) {
      int end = start + 1;
      while (end < m && w(end) - w(end - 1) <= scale) ++end;
      if (end - start > 1) v.middleCols(start, end - start) = align_cluster(v.middleCols(start, end - start));
      start = end;
    }
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < m; ++i) vectors(block[i], next + k) = v(i, k);
      values(next + k) = w(k);
    }
    next += m;
  }

  // Greedy one-to-one assignment in order of decreasing overlap.
  struct Pair {
    double overlap;
    int bare;
    int dressed;
  };
  std::vector<Pair> pairs;
  for (int k = 0; k < dim; ++k) {
    for (int b = 0; b < dim; ++b) {
      const double o = std::norm(vectors(b, k));
      if (o > 0.0) pairs.push_back({o, b, k});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.bare != b.bare) return a.bare < b.bare;
    return a.dressed < b.dressed;
  });
  std::vector<int> dressed_of(dim, -1);
  std::vector<bool> used(dim, false);
  for (const Pair& p : pairs) {
    if (dressed_of[p.bare] >= 0 || used[p.dressed]) continue;
    dressed_of[p.bare] = p.dressed;
    used[p.dressed] = true;
  }

  DressedBasis out;
  out.unitary.resize(dim, dim);
  out.energies.resize(dim);
  out.overlaps.resize(dim);
  for (int b = 0; b < dim; ++b) {
    if (dressed_of[b] < 0) throw PhysicsError("dressed-state matching failed to assign every bare state");
    Vector col = vectors.col(dressed_of[b]);
    const cplx lead = col(b);
    if (std::abs(lead) > 0.0) col *= std::conj(lead) / std::abs(lead);
    col(b) = cplx(col(b).real(), 0.0);
    out.unitary.col(b) = col;
    out.energies(b) = values(dressed_of[b]);
    out.overlaps(b) = std::norm(col(b));
  }
  auto check = [&](int b) {
    if (out.overlaps(b) < 0.5) {
      std::ostringstream os;
      os << "non-dispersive regime: dressed state for bare " << to_string(space.label(b)) << " has overlap "
         << out.overlaps(b) << " < 0.5";
      throw PhysicsError(os.str());
    }
  };
  if (relevant.empty()) {
    for (int b = 0; b < dim; ++b) check(b);
  } else {
    for (int b : relevant) {
      if (b < 0 || b >= dim) throw ConfigError("relevant index out of range");
      check(b);
    }
  }
  return out;
}

double dressed_frequency(const SystemParams& params, const CompositeSpace& space, Transition transition,
                         std::span<const int> photons) {
  const Level lower = transition == Transition::ge ? Level::g : Level::e;
  const Level upper = transition == Transition::ge ? Level::e : Level::f;
  const int lo = space.index(lower, photons);
  const int hi = space.index(upper, photons);
  const int relevant[] = {lo, hi};
  const DressedBasis d = dressed_basis(params, space, relevant);
  return (d.energies(hi) - d.energies(lo)) / kTwoPi;
}

}  // namespace cqed
