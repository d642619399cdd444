#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqed/analysis.hpp"
#include "cqed/evolve.hpp"
#include "cqed/hamiltonian.hpp"

namespace cqed {

/// Device description for the gate protocols. Coupling flags in `device` are
/// ignored; each protocol step sets its own.
struct GateSetup {
  SystemParams device;
  std::vector<int> controls;  // resonators coupled during the selective rotation
  int target = -1;            // resonator exchanged with the qutrit
  double drive_amplitude = 0.0;  // e↔f drive, GHz
  double preparation_amplitude = 0.025;  // g↔e pulses of the preparation, GHz
  double first_swap = 0.5;   // swap fractions, g·t = fraction·π
  double last_swap = 0.5;
  bool ef_during_swap = true;

  void validate() const;
  SystemParams rotation_params() const;
  SystemParams swap_params(int resonator) const;
};

struct ScanOptions {
  std::optional<double> center;  // GHz; defaults to the dressed estimate
  double half_width = 0.02;      // GHz
  double coarse_step = 0.001;
  double fine_step = 0.0001;
  int window_samples = 400;
};

struct CalibrationResult {
  double drive_frequency = 0.0;  // GHz
  double pulse_duration = 0.0;   // ns, first full return of the target
  double amplitude = 0.0;        // GHz
  double contrast = 0.0;         // target transfer − max non-target transfer
  double target_transfer = 0.0;
  double max_nontarget_transfer = 0.0;
  double estimate = 0.0;  // dressed-frequency centre of the scan, GHz
  double window = 0.0;    // ns
  double scan_min = 0.0;
  double scan_max = 0.0;
  double coarse_step = 0.0;
  double fine_step = 0.0;
  bool rescan = false;
  std::vector<int> target_photons;
  std::vector<bool> coupling_on;
  std::vector<std::pair<double, double>> scan;  // (frequency GHz, contrast), coarse then fine
};

/// Scans the e↔f drive frequency for the photon configuration `target_photons`
/// (one entry per resonator; decoupled resonators must be 0) of `params`.
/// Non-targets are the other {0,1} configurations of the coupled resonators.
CalibrationResult calibrate_drive(const SystemParams& params, const CompositeSpace& space,
                                  const std::vector<int>& target_photons, double amplitude,
                                  const ScanOptions& options = {});

/// Resonant exchange with g_ge·t = fraction·π. `params` must have the resonator
/// tuned to ω_ge; only its coupling is switched on.
Segment resonant_swap_segment(const SystemParams& params, int resonator, double fraction,
                              bool ef_during_swap = true);

/// Adiabatic 2π e↔f rotation at the calibrated frequency and duration.
Segment selective_rotation_segment(const SystemParams& params, const std::vector<int>& target_photons,
                                   const std::optional<CalibrationResult>& calibration);

/// g↔e pulse of area `turns`·π at ω_ge with all couplings off, phased to the
/// segment start so the rotation axis is x in the idle frame.
Segment qutrit_pulse_segment(const SystemParams& params, double amplitude, double turns, double start_time);

std::vector<int> cphase_target_photons(const GateSetup& setup);
std::vector<int> ccphase_target_photons(const GateSetup& setup);

Schedule cphase_protocol(const GateSetup& setup, const std::optional<CalibrationResult>& calibration);
Schedule ccphase_protocol(const GateSetup& setup, const std::optional<CalibrationResult>& calibration);
Schedule prepare_uniform_superposition(const GateSetup& setup);

/// Group frequencies ω'_ef(n1,n2) of the two control resonators, GHz, ordered
/// (0,0), (1,0), (0,1), (1,1).
std::vector<double> cc_group_frequencies(const GateSetup& setup);

struct GateReport {
  double fidelity = 0.0;          // trace form, reduced resonator state
  double fidelity_uhlmann = 0.0;  // squared Uhlmann
  double total_time = 0.0;        // ns
  double leakage = 0.0;           // population outside the computational subspace
  double norm_drift = 0.0;
  TruthMatrix truth;
  Matrix action;  // full-space output per computational input
  Vector final_state;
  Matrix final_block;  // computational block of the reduced resonator state
  Matrix ideal_block;
  Trajectory trajectory;
};

/// Runs `schedule` on the embedded computational `input` and compares the
/// resonator state with `gate` applied to it.
GateReport analyze_gate(const Schedule& schedule, const CompositeSpace& space, const EvolutionConfig& cfg,
                        const IdealGate& gate, const Vector& input, const std::vector<Monitor>& monitors = {});

/// Trace-form fidelity for another computational input, reusing report.action.
double gate_fidelity_for_input(const GateReport& report, const CompositeSpace& space, const IdealGate& gate,
                               const Vector& input);

/// Bare monitors for every computational state with the qutrit in g.
std::vector<Monitor> computational_monitors(const CompositeSpace& space);

}  // namespace cqed
