// Acceptance report: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqed/app.hpp"
#include "cqed/diagnostics.hpp"
#include "cqed/errors.hpp"
#include "golden_compare.hpp"

using namespace cqed;
using cqed::app::Config;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

class Report {
 public:
  void line(int id, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << " (" << name << "): " << detail << std::endl;
    all_ok_ = all_ok_ && ok;
  }
  bool ok() const { return all_ok_; }

 private:
  bool all_ok_ = true;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string check(bool ok, const std::string& text) { return std::string(ok ? "[ok] " : "[x] ") + text; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cqed_accept_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

Config preset_config(const std::string& preset, const std::string& experiment, const fs::path& out) {
  Config c;
  c.apply_preset(app::find_preset(preset));
  c.set("experiment", experiment, "acceptance");
  c.set("out", out.string(), "acceptance");
  return c;
}

json run_summary(const std::string& preset, const std::string& experiment, const fs::path& out,
                 double* seconds = nullptr) {
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  app::run(preset_config(preset, experiment, out), log);
  if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return json::parse(cqed::testing::slurp(out / "summary.json"));
}

Matrix truth_of(const json& summary) {
  const json& re = summary.at("truth_matrix").at("re");
  const json& im = summary.at("truth_matrix").at("im");
  const int d = static_cast<int>(re.size());
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(re[i][j].get<double>(), im[i][j].get<double>());
  return m;
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

void selectivity(Report& r) {
  const fs::path out = scratch("rabi");
  double seconds = 0.0;
  const json s = run_summary("paper-cphase", "selective-rabi", out, &seconds);
  const double peak = s.at("rot0_peak_transfer");
  const double leak = s.at("rot1_max_transfer");
  const bool a = peak >= 0.99;
  const bool b = leak <= 0.05;
  const bool c = seconds < 30.0;
  r.line(1, "selectivity", a && b && c,
         check(a, "ROT0 e-f peak " + fmt(peak) + " >= 0.99") + "; " + check(b, "ROT1 max " + fmt(leak) + " <= 0.05") +
             "; " + check(c, "runtime " + fmt(seconds, 3) + " s < 30 s"));
  fs::remove_all(out);
}

void cphase(Report& r) {
  const fs::path out = scratch("cphase");
  const json s = run_summary("paper-cphase", "cphase", out);
  const double f = s.at("fidelity");
  const double t = s.at("total_time_ns");
  const Matrix m = truth_of(s);
  const Matrix ideal = IdealGate::controlled_phase(2).matrix();
  const double dev = (m - ideal).cwiseAbs().maxCoeff();
  const double phase = relative_phase(m, 3);
  const bool a = f >= 0.985;
  const bool b = t >= 0.5 * 93.0 && t <= 1.5 * 93.0;
  const bool c = dev <= 0.05;
  const bool d = std::abs(kPi - std::abs(phase)) <= 0.05;
  r.line(2, "c-phase", a && b && c && d,
         check(a, "F " + fmt(f) + " >= 0.985") + "; " + check(b, "T " + fmt(t) + " ns in [46.5, 139.5]") + "; " +
             check(c, "truth deviation " + fmt(dev) + " <= 0.05") + "; " +
             check(d, "|11> phase " + fmt(phase) + " rad within 0.05 of pi"));
  fs::remove_all(out);
}

void ccphase(Report& r) {
  const fs::path out = scratch("ccphase");
  const json s = run_summary("paper-ccphase", "ccphase", out);
  const double f = s.at("fidelity");
  const double t = s.at("total_time_ns");
  const Matrix m = truth_of(s);
  double other = 0.0;
  for (int k = 0; k < 7; ++k) other = std::max(other, std::abs(m(k, k) - 1.0));
  const bool a = f >= 0.90;
  const bool b = t >= 0.5 * 124.64 && t <= 1.5 * 124.64;
  const bool c = other <= 0.08 && m(7, 7).real() < 0.0;
  r.line(3, "cc-phase", a && b && c,
         check(a, "F " + fmt(f) + " >= 0.90") + "; " + check(b, "T " + fmt(t) + " ns in [62.32, 186.96]") + "; " +
             check(c, "other diagonal deviation " + fmt(other) + " <= 0.08, |111> entry " + fmt(m(7, 7).real()) +
                          fmt(m(7, 7).imag(), 3) + "i"));
  fs::remove_all(out);
}

void grouping(Report& r) {
  Config c;
  c.apply_preset(app::find_preset("paper-ccphase"));
  const GateSetup setup = app::gate_setup(c);
  const int a = setup.controls[0];
  const int b = setup.controls[1];
  const double unit = setup.device.g_ef[a] * setup.device.g_ef[a] / (setup.device.omega_ef - setup.device.omega_r[a]);
  const int order[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const int expected_n[4] = {0, 2, 6, 8};
  bool ok = true;
  std::string values;
  double prev = -1.0;
  for (int i = 0; i < 4; ++i) {
    const double w = cc_shift(setup.device, order[i][0], order[i][1], a, b);
    const double n = (w - setup.device.omega_ef) / unit - 4.0;
    ok = ok && w > prev && std::abs(n - expected_n[i]) < 1e-9 && cc_group_index(order[i][0], order[i][1]) == expected_n[i];
    prev = w;
    values += (i ? ", " : "") + fmt(w, 8);
  }
  const double residual = ratio_condition_residual(setup.device, a, b);
  const bool ratio = residual <= 1e-12;
  r.line(4, "frequency grouping", ok && ratio,
         check(ok, "groups N = 0,2,6,8 at " + values + " GHz") + "; " +
             check(ratio, "ratio residual " + fmt(residual) + " <= 1e-12"));
}

void dispersive(Report& r) {
  bool ok = true;
  double worst = 0.0;
  int cases = 0;
  for (double ratio : {0.05, 0.1, 0.2})
    for (double delta : {0.5, 1.0, -0.75})
      for (int n = 0; n <= 2; ++n) {
        const DispersiveCheck c = check_dispersive_shift(ratio * std::abs(delta), delta, n, 8);
        ok = ok && c.within_bound();
        worst = std::max(worst, c.relative_error / c.bound);
        ++cases;
      }
  r.line(5, "dispersive validator", ok,
         check(ok, std::to_string(cases) + " cases, worst error/bound " + fmt(worst, 4) + " <= 1"));
}

void properties(Report& r) {
  std::vector<std::string> parts;
  bool all = true;
  auto add = [&](bool ok, const std::string& text) {
    all = all && ok;
    parts.push_back(check(ok, text));
  };

  Config c;
  c.apply_preset(app::find_preset("paper-cphase"));
  const GateSetup setup = app::gate_setup(c);
  const CompositeSpace space({3, 3});
  const CalibrationResult calib =
      calibrate_drive(setup.rotation_params(), space, cphase_target_photons(setup), setup.drive_amplitude);
  const Schedule sched = cphase_protocol(setup, calib);
  EvolutionConfig ev;
  const Vector input = embed_computational(space, uniform_computational(2));
  const Propagation p = propagate(StateVector(space, input), sched, ev);
  const GateReport gr = analyze_gate(sched, space, ev, IdealGate::controlled_phase(2), uniform_computational(2));
  const double drift = std::max(p.norm_drift, gr.norm_drift);
  add(drift <= 1e-8, "norm drift " + fmt(drift, 3) + " <= 1e-8");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> freq(5.0, 9.0);
  std::uniform_real_distribution<double> coup(0.0, 0.3);
  const CompositeSpace big({3, 3, 3});
  const Matrix nexc = excitation_number(big).matrix();
  double comm = 0.0;
  for (int t = 0; t < 10; ++t) {
    SystemParams sp;
    sp.omega_ge = freq(rng);
    sp.omega_ef = freq(rng);
    for (int k = 0; k < 3; ++k) {
      sp.omega_r.push_back(freq(rng));
      sp.g_ge.push_back(coup(rng));
      sp.g_ef.push_back(coup(rng));
      sp.coupling_on.push_back(true);
    }
    comm = std::max(comm, commutator(nexc, build_static(sp, big).matrix()).cwiseAbs().maxCoeff());
  }
  add(comm <= 1e-10, "[N_exc, H] " + fmt(comm, 3) + " <= 1e-10");

  // 200 random instances at dim <= 8: partial trace against an explicit
  // contraction, fidelity against the spectrum of ρσ and pure-state overlaps.
  double pt_err = 0.0;
  double f_err = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int da = 2;
    const int db = 2 + 2 * (t % 2);
    const int dim = da * db;
    const Matrix rho = random_density(rng, dim, 1 + t % dim);
    Matrix oracle = Matrix::Zero(da, da);
    for (int k = 0; k < db; ++k) {
      Matrix ek = Matrix::Zero(db, 1);
      ek(k, 0) = 1.0;
      const Matrix proj = kron(Matrix::Identity(da, da), ek);
      oracle += proj.adjoint() * rho * proj;
    }
    pt_err = std::max(pt_err, (partial_trace(DensityMatrix({da, db}, rho), {0}).matrix() - oracle).cwiseAbs().maxCoeff());

    const Matrix sigma = random_density(rng, dim, 1 + (t / 3) % dim);
    const Eigen::ComplexEigenSolver<Matrix> es(rho * sigma);
    double root = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) root += std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    const DensityMatrix dr({dim}, rho);
    const DensityMatrix ds({dim}, sigma);
    f_err = std::max(f_err, std::abs(fidelity_uhlmann(dr, ds) - root * root));
    f_err = std::max(f_err, std::abs(fidelity_trace_form(dr, ds) - (rho * sigma).trace().real()));
    Vector u = random_density(rng, dim, 1).col(0);
    Vector v = random_density(rng, dim, 1).col(0);
    u.normalize();
    v.normalize();
    const double overlap = std::norm(u.dot(v));
    const FidelityPair fp = fidelities(DensityMatrix::pure({dim}, u), DensityMatrix::pure({dim}, v));
    f_err = std::max({f_err, std::abs(fp.trace_form - overlap), std::abs(fp.uhlmann - overlap)});
  }
  add(pt_err <= 1e-12 && f_err <= 1e-7,
      "200 oracle cases: partial trace " + fmt(pt_err, 3) + ", fidelity " + fmt(f_err, 3));

  EvolutionConfig half = ev;
  half.max_step = ev.max_step / 2;
  const Vector q = propagate(StateVector(space, input), sched, half).state;
  const double halving = (q - p.state).cwiseAbs().maxCoeff();
  add(halving <= 1e-7, "step halving " + fmt(halving, 3) + " <= 1e-7");

  const SystemParams sw = setup.swap_params(setup.target);
  Schedule four;
  for (int i = 0; i < 4; ++i) four.append(resonant_swap_segment(sw, setup.target, 0.5));
  const int g1 = space.index(Level::g, std::vector<int>{0, 1});
  const int e0 = space.index(Level::e, std::vector<int>{0, 0});
  Matrix cols = Matrix::Zero(space.dimension(), 2);
  cols(g1, 0) = 1.0;
  cols(e0, 1) = 1.0;
  const Matrix o = propagate_columns(space, cols, four, ev);
  Matrix block(2, 2);
  block << o(g1, 0), o(g1, 1), o(e0, 0), o(e0, 1);
  const double swap_err = (block - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
  add(swap_err <= 1e-3, "four half swaps " + fmt(swap_err, 3) + " <= 1e-3");

  std::string detail;
  for (std::size_t i = 0; i < parts.size(); ++i) detail += (i ? "; " : "") + parts[i];
  r.line(6, "property suites", all, detail);
}

void preparation(Report& r) {
  const fs::path out = scratch("prepare");
  const json s = run_summary("paper-cphase", "prepare", out);
  const double f = s.at("fidelity");
  const bool ok = f >= 0.99;
  r.line(7, "state preparation", ok, check(ok, "2-resonator F " + fmt(f) + " >= 0.99"));
  fs::remove_all(out);
}

void determinism(Report& r) {
  struct Run {
    const char* experiment;
    const char* preset;
  };
  const Run runs[] = {{"shift-table", "paper-ccphase"}, {"shift-table", "paper-cphase"}, {"prepare", "paper-cphase"},
                      {"selective-rabi", "paper-cphase"}, {"cphase", "paper-cphase"}};
  bool identical = true;
  bool golden = true;
  std::string first_problem;
  for (const Run& run : runs) {
    const std::string name = std::string(run.experiment) + "-" + run.preset;
    const fs::path a = scratch("det_a_" + name);
    const fs::path b = scratch("det_b_" + name);
    run_summary(run.preset, run.experiment, a);
    run_summary(run.preset, run.experiment, b);
    for (const auto& entry : fs::directory_iterator(a)) {
      const std::string file = entry.path().filename().string();
      if (file == "manifest.json") continue;
      if (cqed::testing::slurp(entry.path()) != cqed::testing::slurp(b / file)) {
        identical = false;
        if (first_problem.empty()) first_problem = name + "/" + file + " not byte-identical";
      }
    }
    const fs::path g = fs::path(CQED_GOLDEN_DIR) / name;
    if (!fs::is_directory(g)) {
      golden = false;
      if (first_problem.empty()) first_problem = "missing golden " + name;
    } else {
      for (const auto& entry : fs::directory_iterator(g)) {
        const std::string diff = cqed::testing::compare_files(entry.path(), a / entry.path().filename());
        if (!diff.empty()) {
          golden = false;
          if (first_problem.empty()) first_problem = name + ": " + diff;
        }
      }
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
  r.line(8, "determinism", identical && golden,
         check(identical, "reruns byte-identical") + "; " + check(golden, "goldens within relative 1e-9") +
             (first_problem.empty() ? "" : " (" + first_problem + ")"));
}

template <typename F>
void guarded(Report& r, int id, const char* name, F f) {
  try {
    f(r);
  } catch (const std::exception& e) {
    r.line(id, name, false, std::string("error: ") + e.what());
  }
}

}  // namespace

int main() {
  set_warning_sink({});
  Report r;
  guarded(r, 1, "selectivity", selectivity);
  guarded(r, 2, "c-phase", cphase);
  guarded(r, 3, "cc-phase", ccphase);
  guarded(r, 4, "frequency grouping", grouping);
  guarded(r, 5, "dispersive validator", dispersive);
  guarded(r, 6, "property suites", properties);
  guarded(r, 7, "state preparation", preparation);
  guarded(r, 8, "determinism", determinism);
  return r.ok() ? 0 : 1;
}
