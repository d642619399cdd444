#include "cqed/protocols.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <sstream>

#include "cqed/errors.hpp"

namespace cqed {
namespace {

constexpr double kResonanceTolerance = 1e-6;  // GHz
constexpr double kRatioTolerance = 0.01;
constexpr double kGroupSeparationFactor = 5.0;

std::vector<bool> only(int count, const std::vector<int>& on) {
  std::vector<bool> flags(count, false);
  for (int r : on) flags.at(r) = true;
  return flags;
}

struct Probe {
  double contrast = 0.0;
  double target = 0.0;
  double nontarget = 0.0;
};

// |Σ_k w_k e^{-iμ_k t}|², the transfer probability in the drive frame.
double transfer(const Vector& w, const RealVector& mu, double t) {
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) s += w(k) * std::exp(cplx(0.0, -mu(k) * t));
  return std::norm(s);
}

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void GateSetup::validate() const {
  device.validate();
  const int k = device.resonator_count();
  if (target < 0 || target >= k) throw ConfigError("swap resonator index out of range");
  for (int c : controls) {
    if (c < 0 || c >= k) throw ConfigError("control resonator index out of range");
    if (c == target) throw ConfigError("swap resonator cannot also be a control");
  }
  if (!(drive_amplitude > 0.0)) throw ConfigError("drive amplitude must be positive");
  if (!(preparation_amplitude > 0.0)) throw ConfigError("preparation amplitude must be positive");
  if (!(first_swap > 0.0) || !(last_swap > 0.0)) throw ConfigError("swap fractions must be positive");
}

SystemParams GateSetup::rotation_params() const {
  return device.with_couplings(only(device.resonator_count(), controls));
}

SystemParams GateSetup::swap_params(int resonator) const {
  SystemParams p = device.with_resonator_frequency(resonator, device.omega_ge)
                       .with_couplings(only(device.resonator_count(), {resonator}));
  if (!ef_during_swap) p.g_ef[resonator] = 0.0;
  return p;
}

CalibrationResult calibrate_drive(const SystemParams& params, const CompositeSpace& space,
                                  const std::vector<int>& target_photons, double amplitude,
                                  const ScanOptions& options) {
  params.validate();
  const int k = space.resonator_count();
  if (params.resonator_count() != k || static_cast<int>(target_photons.size()) != k) {
    throw ConfigError("calibration target does not match the resonator count");
  }
  if (!(amplitude > 0.0)) throw ConfigError("calibration drive amplitude must be positive");
  if (!(options.coarse_step > 0.0) || !(options.fine_step > 0.0) || !(options.half_width > options.coarse_step)) {
    throw ConfigError("calibration scan needs 0 < fine_step, coarse_step < half_width");
  }
  if (options.window_samples < 10) throw ConfigError("calibration window needs at least 10 samples");

  std::vector<int> coupled;
  for (int r = 0; r < k; ++r) {
    if (params.coupling_on[r]) {
      if (target_photons[r] != 0 && target_photons[r] != 1) throw ConfigError("target photons must be 0 or 1");
      coupled.push_back(r);
    } else if (target_photons[r] != 0) {
      throw ConfigError("target photons of a decoupled resonator must be 0");
    }
  }

  // Photon configurations: index 0 is the target, the rest are non-targets.
  std::vector<std::vector<int>> configs{target_photons};
  const int nc = static_cast<int>(coupled.size());
  for (int bits = 0; bits < (1 << nc); ++bits) {
    std::vector<int> n(k, 0);
    for (int i = 0; i < nc; ++i) n[coupled[i]] = (bits >> (nc - 1 - i)) & 1;
    if (n != target_photons) configs.push_back(n);
  }
  std::vector<int> relevant;
  for (const auto& n : configs) {
    relevant.push_back(space.index(Level::e, n));
    relevant.push_back(space.index(Level::f, n));
  }
  const DressedBasis dressed = dressed_basis(params, space, relevant);
  std::vector<Vector> e_states;
  std::vector<Vector> f_states;
  for (const auto& n : configs) {
    e_states.push_back(dressed.unitary.col(space.index(Level::e, n)));
    f_states.push_back(dressed.unitary.col(space.index(Level::f, n)));
  }

  CalibrationResult out;
  out.amplitude = amplitude;
  out.target_photons = target_photons;
  out.coupling_on = params.coupling_on;
  out.coarse_step = options.coarse_step;
  out.fine_step = options.fine_step;
  const int te = space.index(Level::e, target_photons);
  const int tf = space.index(Level::f, target_photons);
  out.estimate = options.center.value_or((dressed.energies(tf) - dressed.energies(te)) / kTwoPi);
  const double element =
      std::abs(f_states[0].dot(drive_raising(space, Transition::ef).matrix() * e_states[0]));
  if (element < 1e-6) throw PhysicsError("target e-f transition has no drive matrix element");
  out.window = 1.0 / (2.0 * amplitude * element);

  auto segment_at = [&](double frequency) {
    Segment seg;
    seg.duration = out.window;
    seg.params = params;
    seg.drive = DriveParams{amplitude, frequency, Transition::ef, 0.0, true};
    seg.label = "calibration";
    return seg;
  };

  auto probe = [&](double frequency) {
    const SegmentPropagator prop(segment_at(frequency), space);
    const Matrix& v = prop.frame_vectors();
    const RealVector& mu = prop.frame_values();
    Probe p;
    for (std::size_t c = 0; c < configs.size(); ++c) {
      const Vector w = (v.adjoint() * f_states[c]).conjugate().cwiseProduct(v.adjoint() * e_states[c]);
      double best = 0.0;
      for (int j = 0; j <= options.window_samples; ++j) {
        best = std::max(best, transfer(w, mu, out.window * j / options.window_samples));
      }
      if (c == 0) {
        p.target = best;
      } else {
        p.nontarget = std::max(p.nontarget, best);
      }
    }
    p.contrast = p.target - p.nontarget;
    return p;
  };

  auto scan = [&](double centre, double step, int half) {
    int best_i = -half;
    Probe best;
    bool first = true;
    for (int i = -half; i <= half; ++i) {
      const Probe p = probe(centre + i * step);
      out.scan.emplace_back(centre + i * step, p.contrast);
      if (first || p.contrast > best.contrast) {
        best = p;
        best_i = i;
        first = false;
      }
    }
    return std::pair{best_i, best};
  };

  const int coarse_half = static_cast<int>(std::lround(options.half_width / options.coarse_step));
  out.scan_min = out.estimate - coarse_half * options.coarse_step;
  out.scan_max = out.estimate + coarse_half * options.coarse_step;
  const auto [ci, coarse] = scan(out.estimate, options.coarse_step, coarse_half);
  if (std::abs(ci) == coarse_half) {
    out.rescan = true;
    std::ostringstream os;
    os << "calibration optimum at scan edge (" << out.estimate + ci * options.coarse_step << " GHz in ["
       << out.scan_min << ", " << out.scan_max << "])";
    throw PhysicsError(os.str());
  }
  const double coarse_best = out.estimate + ci * options.coarse_step;
  const int fine_half = static_cast<int>(std::lround(options.coarse_step / options.fine_step));
  const auto [fi, fine] = scan(coarse_best, options.fine_step, fine_half);
  out.drive_frequency = coarse_best + fi * options.fine_step;
  out.contrast = fine.contrast;
  out.target_transfer = fine.target;
  out.max_nontarget_transfer = fine.nontarget;

  // First full return of the target's e population.
  const SegmentPropagator prop(segment_at(out.drive_frequency), space);
  const Vector c = prop.frame_vectors().adjoint() * e_states[0];
  const Vector w = c.cwiseAbs2().cast<cplx>();
  const RealVector& mu = prop.frame_values();
  auto back = [&](double t) { return transfer(w, mu, t); };
  const int n = 400;
  const double lo = 0.5 * out.window;
  const double hi = 1.5 * out.window;
  const double h = (hi - lo) / n;
  int best_j = 0;
  double best_v = -1.0;
  for (int j = 0; j <= n; ++j) {
    const double v = back(lo + j * h);
    if (v > best_v) {
      best_v = v;
      best_j = j;
    }
  }
  out.pulse_duration = golden_max(back, lo + std::max(0, best_j - 1) * h, lo + std::min(n, best_j + 1) * h);
  return out;
}

Segment resonant_swap_segment(const SystemParams& params, int resonator, double fraction, bool ef_during_swap) {
  params.validate();
  if (resonator < 0 || resonator >= params.resonator_count()) throw ConfigError("swap resonator out of range");
  const double mismatch = std::abs(params.omega_r[resonator] - params.omega_ge);
  if (mismatch > kResonanceTolerance) {
    std::ostringstream os;
    os << "swap resonator " << resonator + 1 << " is detuned from omega_ge by " << mismatch << " GHz";
    throw PhysicsError(os.str());
  }
  if (!(params.g_ge[resonator] > 0.0)) throw PhysicsError("swap needs a non-zero g-e coupling");
  if (!(fraction > 0.0)) throw ConfigError("swap fraction must be positive");
  Segment seg;
  seg.params = params.with_couplings(only(params.resonator_count(), {resonator}));
  if (!ef_during_swap) seg.params.g_ef[resonator] = 0.0;
  seg.duration = fraction / (2.0 * params.g_ge[resonator]);
  seg.label = "swap r" + std::to_string(resonator + 1);
  return seg;
}

Segment selective_rotation_segment(const SystemParams& params, const std::vector<int>& target_photons,
                                   const std::optional<CalibrationResult>& calibration) {
  if (!calibration) throw PhysicsError("selective rotation requested without a drive calibration");
  if (calibration->target_photons != target_photons || calibration->coupling_on != params.coupling_on) {
    throw PhysicsError("drive calibration was made for a different photon target or coupling pattern");
  }
  Segment seg;
  seg.params = params;
  seg.duration = calibration->pulse_duration;
  seg.drive = DriveParams{calibration->amplitude, calibration->drive_frequency, Transition::ef, 0.0, true};
  seg.switching = Switching::adiabatic;
  std::ostringstream os;
  os << "rotation";
  for (int n : target_photons) os << ' ' << n;
  seg.label = os.str();
  return seg;
}

Segment qutrit_pulse_segment(const SystemParams& params, double amplitude, double turns, double start_time) {
  if (!(amplitude > 0.0) || !(turns > 0.0)) throw ConfigError("qutrit pulse needs positive amplitude and area");
  Segment seg;
  seg.params = params.with_couplings(std::vector<bool>(params.resonator_count(), false));
  seg.duration = turns / (4.0 * amplitude);
  seg.drive = DriveParams{amplitude, params.omega_ge, Transition::ge, -angular(params.omega_ge) * start_time, true};
  seg.drive_time_origin = start_time;
  seg.label = "pulse ge";
  return seg;
}

std::vector<int> cphase_target_photons(const GateSetup& setup) {
  return std::vector<int>(setup.device.resonator_count(), 0);
}

std::vector<int> ccphase_target_photons(const GateSetup& setup) {
  std::vector<int> n(setup.device.resonator_count(), 0);
  for (int c : setup.controls) n.at(c) = 1;
  return n;
}

Schedule cphase_protocol(const GateSetup& setup, const std::optional<CalibrationResult>& calibration) {
  setup.validate();
  if (setup.device.resonator_count() != 2 || setup.controls.size() != 1) {
    throw ConfigError("c-phase needs two resonators with one control");
  }
  Schedule s;
  s.append(resonant_swap_segment(setup.swap_params(setup.target), setup.target, setup.first_swap,
                                 setup.ef_during_swap));
  s.append(selective_rotation_segment(setup.rotation_params(), cphase_target_photons(setup), calibration));
  s.append(resonant_swap_segment(setup.swap_params(setup.target), setup.target, setup.last_swap,
                                 setup.ef_during_swap));
  return s;
}

std::vector<double> cc_group_frequencies(const GateSetup& setup) {
  if (setup.controls.size() != 2) throw ConfigError("cc-phase groups need two control resonators");
  const int a = setup.controls[0];
  const int b = setup.controls[1];
  return {cc_shift(setup.device, 0, 0, a, b), cc_shift(setup.device, 1, 0, a, b), cc_shift(setup.device, 0, 1, a, b),
          cc_shift(setup.device, 1, 1, a, b)};
}

Schedule ccphase_protocol(const GateSetup& setup, const std::optional<CalibrationResult>& calibration) {
  setup.validate();
  if (setup.device.resonator_count() != 3 || setup.controls.size() != 2) {
    throw ConfigError("cc-phase needs three resonators with two controls");
  }
  const double residual = ratio_condition_residual(setup.device, setup.controls[0], setup.controls[1]);
  if (residual > kRatioTolerance) {
    std::ostringstream os;
    os << "ratio condition 3 g1^2/D1 = g2^2/D2 violated by " << residual * 100.0 << "% (> 1%)";
    throw PhysicsError(os.str());
  }
  std::vector<double> groups = cc_group_frequencies(setup);
  std::sort(groups.begin(), groups.end());
  double separation = INFINITY;
  for (std::size_t i = 1; i < groups.size(); ++i) separation = std::min(separation, groups[i] - groups[i - 1]);
  if (separation < kGroupSeparationFactor * setup.drive_amplitude) {
    std::ostringstream os;
    os << "frequency groups separated by " << separation << " GHz < 5 x drive amplitude " << setup.drive_amplitude;
    throw PhysicsError(os.str());
  }
  Schedule s;
  s.append(resonant_swap_segment(setup.swap_params(setup.target), setup.target, setup.first_swap,
                                 setup.ef_during_swap));
  s.append(selective_rotation_segment(setup.rotation_params(), ccphase_target_photons(setup), calibration));
  s.append(resonant_swap_segment(setup.swap_params(setup.target), setup.target, setup.last_swap,
                                 setup.ef_during_swap));
  return s;
}

Schedule prepare_uniform_superposition(const GateSetup& setup) {
  setup.device.validate();
  if (!(setup.preparation_amplitude > 0.0)) throw ConfigError("preparation amplitude must be positive");
  Schedule s;
  for (int r = 0; r < setup.device.resonator_count(); ++r) {
    s.append(qutrit_pulse_segment(setup.device, setup.preparation_amplitude, 0.5, s.total_duration()));
    s.append(resonant_swap_segment(setup.swap_params(r), r, 1.5, setup.ef_during_swap));
  }
  return s;
}

GateReport analyze_gate(const Schedule& schedule, const CompositeSpace& space, const EvolutionConfig& cfg,
                        const IdealGate& gate, const Vector& input, const std::vector<Monitor>& monitors) {
  if (gate.qubits() != space.resonator_count()) throw ConfigError("ideal gate size does not match the space");
  GateReport r;
  r.total_time = schedule.total_duration();
  r.action = computational_action(schedule, space, cfg);
  r.truth = truth_from_action(space, r.action);
  for (Eigen::Index k = 0; k < r.action.cols(); ++k) {
    r.norm_drift = std::max(r.norm_drift, std::abs(r.action.col(k).norm() - 1.0));
  }
  const Vector in = input / input.norm();
  r.final_state = r.action * in;
  const DensityMatrix final_res = reduced_resonator_state(space, r.final_state);
  const DensityMatrix ideal_res = ideal_resonator_state(space, gate.apply(in));
  const FidelityPair f = fidelities(final_res, ideal_res);
  r.fidelity = f.trace_form;
  r.fidelity_uhlmann = f.uhlmann;
  double inside = 0.0;
  for (int idx : space.computational_indices()) inside += std::norm(r.final_state(idx));
  r.leakage = std::max(0.0, 1.0 - inside);
  r.final_block = computational_block(final_res);
  r.ideal_block = computational_block(ideal_res);
  if (cfg.sample_interval > 0.0 && !monitors.empty()) {
    const Propagation p = propagate(StateVector(space, embed_computational(space, in)), schedule, cfg, monitors);
    r.trajectory = p.trajectory;
    r.norm_drift = std::max(r.norm_drift, p.norm_drift);
  }
  return r;
}

double gate_fidelity_for_input(const GateReport& report, const CompositeSpace& space, const IdealGate& gate,
                               const Vector& input) {
  const Vector in = input / input.norm();
  const Vector out = report.action * in;
  return fidelity_trace_form(reduced_resonator_state(space, out), ideal_resonator_state(space, gate.apply(in)));
}

std::vector<Monitor> computational_monitors(const CompositeSpace& space) {
  std::vector<Monitor> out;
  for (int idx : space.computational_indices()) {
    const BasisLabel l = space.label(idx);
    std::string name = "P";
    for (int n : l.photons) name += std::to_string(n);
    name += level_name(l.qutrit);
    out.push_back({Basis::bare, idx, name});
  }
  return out;
}

}  // namespace cqed
