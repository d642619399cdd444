#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "cqed/app.hpp"
#include "cqed/errors.hpp"

namespace cqed::app {
namespace {

using json = nlohmann::ordered_json;

const std::set<std::string> kExperiments = {"selective-rabi", "cphase", "ccphase", "prepare", "calibrate",
                                            "shift-table"};

json num(double v) { return round12(v); }

json complex_matrix(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    json c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(num(m(i, j).real()));
      c.push_back(num(m(i, j).imag()));
    }
    re.push_back(r);
    im.push_back(c);
  }
  return json{{"re", re}, {"im", im}};
}

json calibration_json(const CalibrationResult& c) {
  return json{{"drive_frequency_ghz", num(c.drive_frequency)},
              {"pulse_duration_ns", num(c.pulse_duration)},
              {"drive_amplitude_ghz", num(c.amplitude)},
              {"contrast", num(c.contrast)},
              {"target_transfer", num(c.target_transfer)},
              {"max_nontarget_transfer", num(c.max_nontarget_transfer)},
              {"dressed_estimate_ghz", num(c.estimate)},
              {"window_ns", num(c.window)},
              {"scan_min_ghz", num(c.scan_min)},
              {"scan_max_ghz", num(c.scan_max)},
              {"coarse_step_ghz", num(c.coarse_step)},
              {"fine_step_ghz", num(c.fine_step)},
              {"rescan", c.rescan},
              {"target_photons", c.target_photons}};
}

json schedule_json(const Schedule& s) {
  json out = json::array();
  for (const Segment& seg : s.segments) {
    out.push_back(json{{"label", seg.label},
                       {"start_ns", num(seg.drive_time_origin)},
                       {"duration_ns", num(seg.duration)},
                       {"switching", seg.switching == Switching::adiabatic ? "adiabatic" : "sudden"}});
  }
  return out;
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void table(const std::string& name, const Table& t) {
    std::string s;
    for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
    s += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
      s += '\n';
    }
    pending_.emplace_back(name, std::move(s));
  }

  void document(const std::string& name, const json& j) { pending_.emplace_back(name, j.dump(2) + "\n"); }

  std::vector<std::filesystem::path> flush() {
    std::filesystem::create_directories(dir_);
    std::vector<std::filesystem::path> out;
    for (const auto& [name, body] : pending_) {
      const auto path = dir_ / name;
      std::ofstream f(path, std::ios::binary);
      f << body;
      if (!f) throw std::runtime_error("failed to write " + path.string());
      out.push_back(path);
    }
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> pending_;
};

Vector random_input(PortableRandom& rng, int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(i) = cplx(re, im);
  }
  return v / v.norm();
}

std::vector<int> rabi_photons(const GateSetup& setup, bool excited_control) {
  std::vector<int> n(setup.device.resonator_count(), 0);
  if (excited_control) n.at(setup.controls.at(0)) = 1;
  return n;
}

std::vector<int> calibration_target(const GateSetup& setup) {
  return setup.controls.size() == 1 ? cphase_target_photons(setup) : ccphase_target_photons(setup);
}

json warnings_json(const SystemParams& p) {
  json w = json::array();
  for (const std::string& s : p.dispersive_warnings()) w.push_back(s);
  return w;
}

void selective_rabi(const Config& cfg, const GateSetup& setup, Writer& out, json& summary) {
  const CompositeSpace space = space_for(cfg, setup.device.resonator_count());
  const EvolutionConfig ev = evolution_config(cfg);
  const SystemParams params = setup.rotation_params();
  double frequency = cfg.number("drive.frequency");
  const std::string source = cfg.text("rabi.frequency");
  if (source == "calibrated") {
    const CalibrationResult c =
        calibrate_drive(params, space, cphase_target_photons(setup), setup.drive_amplitude, scan_options(cfg));
    frequency = c.drive_frequency;
    summary["calibration"] = calibration_json(c);
  } else if (source != "reference") {
    throw ConfigError("key 'rabi.frequency': expected reference or calibrated");
  }
  const double window = cfg.number("rabi.window");
  if (!(window > 0.0)) throw ConfigError("key 'rabi.window': must be positive");
  Segment seg;
  seg.duration = window;
  seg.params = params;
  seg.drive = DriveParams{setup.drive_amplitude, frequency, Transition::ef, 0.0, true};
  seg.label = "rabi";
  Schedule s;
  s.initial_frame = Basis::dressed;
  s.append(seg);

  Trajectory merged;
  merged.names = {"rot0_e", "rot0_f", "rot1_e", "rot1_f"};
  double peak[2] = {0.0, 0.0};
  double peak_time[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    const std::vector<int> n = rabi_photons(setup, c == 1);
    const int ie = space.index(Level::e, n);
    const int iff = space.index(Level::f, n);
    const std::vector<Monitor> monitors = {{Basis::dressed, ie, "e"}, {Basis::dressed, iff, "f"}};
    const Propagation p = propagate(basis_state(space, Level::e, n), s, ev, monitors);
    if (c == 0) merged.times = p.trajectory.times;
    merged.populations.resize(p.trajectory.size());
    for (std::size_t i = 0; i < p.trajectory.size(); ++i) {
      merged.populations[i].push_back(p.trajectory.populations[i][0]);
      merged.populations[i].push_back(p.trajectory.populations[i][1]);
      if (p.trajectory.populations[i][1] > peak[c]) {
        peak[c] = p.trajectory.populations[i][1];
        peak_time[c] = p.trajectory.times[i];
      }
    }
  }
  out.table("trajectory.csv", trajectory_table(merged));
  summary["drive_frequency_ghz"] = num(frequency);
  summary["drive_frequency_source"] = source;
  summary["drive_amplitude_ghz"] = num(setup.drive_amplitude);
  summary["window_ns"] = num(window);
  summary["rot0_peak_transfer"] = num(peak[0]);
  summary["rot0_peak_time_ns"] = num(peak_time[0]);
  summary["rot1_max_transfer"] = num(peak[1]);
  summary["dressed_ef_frequency_n0_ghz"] =
      num(dressed_frequency(params, space, Transition::ef, rabi_photons(setup, false)));
  summary["dressed_ef_frequency_n1_ghz"] =
      num(dressed_frequency(params, space, Transition::ef, rabi_photons(setup, true)));
  summary["dispersive_warnings"] = warnings_json(params);
}

void gate(const Config& cfg, const GateSetup& setup, bool cc, Writer& out, json& summary) {
  const int k = setup.device.resonator_count();
  const CompositeSpace space = space_for(cfg, k);
  const EvolutionConfig ev = evolution_config(cfg);
  const std::vector<int> target = cc ? ccphase_target_photons(setup) : cphase_target_photons(setup);
  if (cc) {
    // Reject unusable parameter sets before the scan.
    summary["ratio_condition_residual"] = num(ratio_condition_residual(setup.device, setup.controls.at(0),
                                                                       setup.controls.at(1)));
  }
  const CalibrationResult calib =
      calibrate_drive(setup.rotation_params(), space, target, setup.drive_amplitude, scan_options(cfg));
  const Schedule schedule = cc ? ccphase_protocol(setup, calib) : cphase_protocol(setup, calib);
  const IdealGate ideal = IdealGate::controlled_phase(k);
  const GateReport r =
      analyze_gate(schedule, space, ev, ideal, uniform_computational(k), computational_monitors(space));

  PortableRandom rng(static_cast<std::uint64_t>(cfg.integer("seed")));
  const int inputs = cfg.integer("robustness.inputs");
  if (inputs < 0) throw ConfigError("key 'robustness.inputs': must be non-negative");
  double worst = 1.0;
  double mean = 0.0;
  for (int i = 0; i < inputs; ++i) {
    const double f = gate_fidelity_for_input(r, space, ideal, random_input(rng, 1 << k));
    worst = std::min(worst, f);
    mean += f / inputs;
  }

  const int last = (1 << k) - 1;
  double deviation = 0.0;
  for (int i = 0; i <= last; ++i) {
    for (int j = 0; j <= last; ++j) deviation = std::max(deviation, std::abs(r.truth.matrix(i, j) - ideal.matrix()(i, j)));
  }
  double other_diag = 0.0;
  for (int i = 0; i < last; ++i) other_diag = std::max(other_diag, std::abs(r.truth.matrix(i, i) - cplx(1.0)));

  out.table("trajectory.csv", trajectory_table(r.trajectory));
  out.table("density_matrix.csv", density_table(r.final_block));
  out.table("ideal_density_matrix.csv", density_table(r.ideal_block));
  summary["fidelity"] = num(r.fidelity);
  summary["fidelity_uhlmann"] = num(r.fidelity_uhlmann);
  summary["total_time_ns"] = num(r.total_time);
  summary["leakage"] = num(r.leakage);
  summary["max_column_leakage"] = num(r.truth.max_leakage());
  summary["unitarity_deviation"] = num(r.truth.unitarity_deviation());
  summary["norm_drift"] = num(r.norm_drift);
  summary["all_ones_phase_rad"] = num(relative_phase(r.truth.matrix, last));
  summary["truth_max_deviation"] = num(deviation);
  summary["other_diagonal_max_deviation"] = num(other_diag);
  summary["truth_matrix"] = complex_matrix(r.truth.matrix);
  summary["calibration"] = calibration_json(calib);
  summary["schedule"] = schedule_json(schedule);
  summary["robustness"] = json{{"seed", cfg.integer("seed")},
                               {"inputs", inputs},
                               {"min_fidelity", num(inputs ? worst : r.fidelity)},
                               {"mean_fidelity", num(inputs ? mean : r.fidelity)}};
  summary["dispersive_warnings"] = warnings_json(setup.rotation_params());
}

void prepare(const Config& cfg, const GateSetup& setup, Writer& out, json& summary) {
  const int k = setup.device.resonator_count();
  const CompositeSpace space = space_for(cfg, k);
  const EvolutionConfig ev = evolution_config(cfg);
  const Schedule schedule = prepare_uniform_superposition(setup);
  const Propagation p =
      propagate(basis_state(space, Level::g, std::vector<int>(k, 0)), schedule, ev, computational_monitors(space));
  const DensityMatrix res = reduced_resonator_state(space, p.state);
  const DensityMatrix ideal = ideal_resonator_state(space, uniform_computational(k));
  const FidelityPair f = fidelities(res, ideal);
  double entropy = 0.0;
  if (k >= 2) entropy = von_neumann_entropy_bits(partial_trace(res, {0}));
  out.table("trajectory.csv", trajectory_table(p.trajectory));
  out.table("density_matrix.csv", density_table(computational_block(res)));
  summary["fidelity"] = num(f.trace_form);
  summary["fidelity_uhlmann"] = num(f.uhlmann);
  summary["total_time_ns"] = num(schedule.total_duration());
  summary["entanglement_entropy_bits"] = num(entropy);
  summary["norm_drift"] = num(p.norm_drift);
  summary["schedule"] = schedule_json(schedule);
}

void calibrate(const Config& cfg, const GateSetup& setup, Writer& out, json& summary) {
  const CompositeSpace space = space_for(cfg, setup.device.resonator_count());
  const CalibrationResult c = calibrate_drive(setup.rotation_params(), space, calibration_target(setup),
                                              setup.drive_amplitude, scan_options(cfg));
  Table t;
  t.header = {"frequency_ghz", "contrast"};
  for (const auto& [f, v] : c.scan) t.rows.push_back({f, v});
  out.table("scan.csv", t);
  summary["calibration"] = calibration_json(c);
  summary["reference_frequency_ghz"] = num(cfg.number("drive.frequency"));
  summary["offset_from_reference_ghz"] = num(c.drive_frequency - cfg.number("drive.frequency"));
}

void shift_table(const Config& cfg, const GateSetup& setup, Writer& out, json& summary) {
  const CompositeSpace space = space_for(cfg, setup.device.resonator_count());
  const SystemParams params = setup.rotation_params();
  const SystemParams& d = setup.device;
  Table t;
  if (setup.controls.size() == 2) {
    const int a = setup.controls[0];
    const int b = setup.controls[1];
    const double unit = d.g_ef[a] * d.g_ef[a] / (d.omega_ef - d.omega_r[a]);
    t.header = {"n1", "n2", "N", "perturbative_ghz", "dressed_ghz", "group_offset"};
    std::vector<double> values;
    for (int n2 = 0; n2 <= 1; ++n2) {
      for (int n1 = 0; n1 <= 1; ++n1) {
        std::vector<int> n(d.resonator_count(), 0);
        n[a] = n1;
        n[b] = n2;
        const double pert = cc_shift(d, n1, n2, a, b);
        values.push_back(pert);
        t.rows.push_back({double(n1), double(n2), double(cc_group_index(n1, n2)), pert,
                          dressed_frequency(params, space, Transition::ef, n), (pert - d.omega_ef) / unit - 4.0});
      }
    }
    std::sort(t.rows.begin(), t.rows.end(), [](const auto& x, const auto& y) { return x[2] < y[2]; });
    std::sort(values.begin(), values.end());
    double sep = INFINITY;
    for (std::size_t i = 1; i < values.size(); ++i) sep = std::min(sep, values[i] - values[i - 1]);
    summary["ratio_condition_residual"] = num(ratio_condition_residual(d, a, b));
    summary["min_group_separation_ghz"] = num(sep);
    summary["separation_guard_ghz"] = num(5.0 * setup.drive_amplitude);
  } else {
    const int a = setup.controls.at(0);
    t.header = {"n", "perturbative_ghz", "dressed_ghz"};
    for (int n1 = 0; n1 <= 2; ++n1) {
      std::vector<int> n(d.resonator_count(), 0);
      n[a] = n1;
      const double pert = d.omega_ef + dispersive_shift_two_level(d.g_ef[a], d.omega_ef - d.omega_r[a], n1);
      t.rows.push_back({double(n1), pert, dressed_frequency(params, space, Transition::ef, n)});
    }
  }
  out.table("shift_table.csv", t);
  summary["omega_ef_ghz"] = num(d.omega_ef);
}

}  // namespace

GateSetup gate_setup(const Config& cfg) {
  GateSetup s;
  s.device.omega_ge = cfg.number("device.omega_ge");
  s.device.omega_ef = cfg.number("device.omega_ef");
  s.device.omega_r = cfg.numbers("device.omega_r");
  s.device.g_ge = cfg.numbers("device.g_ge");
  s.device.g_ef = cfg.numbers("device.g_ef");
  s.device.coupling_on.assign(s.device.omega_r.size(), false);
  s.device.validate();
  for (int c : cfg.integers("gate.controls")) s.controls.push_back(c - 1);
  s.target = cfg.integer("gate.target") - 1;
  const std::string unit = cfg.text("drive.amplitude_unit");
  const double amp = cfg.number("drive.amplitude");
  if (unit == "ghz") {
    s.drive_amplitude = amp;
  } else if (unit == "ghz_rabi") {
    s.drive_amplitude = 0.5 * amp;
  } else if (unit == "rad_per_ns") {
    s.drive_amplitude = amp / kTwoPi;
  } else {
    throw ConfigError("key 'drive.amplitude_unit': expected ghz, ghz_rabi or rad_per_ns, got '" + unit + "'");
  }
  s.preparation_amplitude = cfg.number("prep.amplitude");
  s.first_swap = cfg.number("gate.first_swap");
  s.last_swap = cfg.number("gate.last_swap");
  s.ef_during_swap = cfg.flag("gate.ef_during_swap");
  s.validate();
  return s;
}

CompositeSpace space_for(const Config& cfg, int resonators) {
  const int cutoff = cfg.integer("cutoff");
  if (cutoff < 2) throw ConfigError("key 'cutoff': protocol resonators need a cutoff of at least 2");
  if (cutoff > 8) throw ConfigError("key 'cutoff': at most 8 supported");
  return CompositeSpace(std::vector<int>(resonators, cutoff));
}

EvolutionConfig evolution_config(const Config& cfg) {
  EvolutionConfig e;
  e.max_step = cfg.number("evolve.max_step");
  e.sample_interval = cfg.number("evolve.sample_interval");
  const std::string integ = cfg.text("evolve.integrator");
  if (integ == "exact") {
    e.integrator = Integrator::exact;
  } else if (integ == "midpoint") {
    e.integrator = Integrator::midpoint;
  } else {
    throw ConfigError("key 'evolve.integrator': expected exact or midpoint, got '" + integ + "'");
  }
  const std::string frame = cfg.text("evolve.frame");
  if (frame == "idle") {
    e.frame = Frame::idle;
  } else if (frame == "lab") {
    e.frame = Frame::lab;
  } else {
    throw ConfigError("key 'evolve.frame': expected idle or lab, got '" + frame + "'");
  }
  e.renormalize_each_step = cfg.flag("evolve.renormalize");
  e.validate();
  return e;
}

ScanOptions scan_options(const Config& cfg) {
  ScanOptions o;
  o.half_width = cfg.number("calib.half_width");
  o.coarse_step = cfg.number("calib.coarse_step");
  o.fine_step = cfg.number("calib.fine_step");
  o.window_samples = cfg.integer("calib.window_samples");
  return o;
}

RunResult run(const Config& cfg, std::ostream& log) {
  const std::string experiment = cfg.text("experiment");
  if (!kExperiments.count(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  // Parse everything up front so configuration errors never leave files behind.
  const GateSetup setup = gate_setup(cfg);
  space_for(cfg, setup.device.resonator_count());
  evolution_config(cfg);
  scan_options(cfg);
  cfg.number("drive.frequency");
  cfg.integer("seed");
  const std::filesystem::path dir = cfg.text("out");

  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  Writer out(dir);
  json summary;
  summary["experiment"] = experiment;
  summary["preset"] = cfg.text("preset");
  log << "running " << experiment << '\n';
  if (experiment == "selective-rabi") {
    selective_rabi(cfg, setup, out, summary);
  } else if (experiment == "cphase") {
    gate(cfg, setup, false, out, summary);
  } else if (experiment == "ccphase") {
    gate(cfg, setup, true, out, summary);
  } else if (experiment == "prepare") {
    prepare(cfg, setup, out, summary);
  } else if (experiment == "calibrate") {
    calibrate(cfg, setup, out, summary);
  } else {
    shift_table(cfg, setup, out, summary);
  }
  out.document("summary.json", summary);
  RunResult result;
  result.files = out.flush();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["artifact"] = "cqed";
  manifest["version"] = kVersion;
  manifest["experiment"] = experiment;
  json config = json::object();
  for (const auto& [key, value] : cfg.resolved()) config[key] = value;
  manifest["config"] = config;
  manifest["seed_usage"] = "random computational inputs for the robustness check only";
  const std::time_t tt = std::chrono::system_clock::to_time_t(started);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  manifest["started_utc"] = stamp;
  manifest["wall_clock_seconds"] = elapsed;
  json files = json::array();
  for (const auto& f : result.files) {
    files.push_back(json{{"name", f.filename().string()},
                         {"bytes", std::filesystem::file_size(f)},
                         {"sha256", sha256_file(f)}});
  }
  manifest["files"] = files;
  const auto mpath = dir / "manifest.json";
  std::ofstream(mpath, std::ios::binary) << manifest.dump(2) << '\n';
  result.files.push_back(mpath);
  for (const auto& f : result.files) log << "wrote " << f.string() << '\n';
  return result;
}

}  // namespace cqed::app
