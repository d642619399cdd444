#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cqed/app.hpp"
#include "cqed/errors.hpp"

namespace cqed::app {
namespace {

struct KeySpec {
  const char* key;
  const char* fallback;  // nullptr: required
  const char* help;
};

const KeySpec kKeys[] = {
    {"experiment", nullptr, "selective-rabi | cphase | ccphase | prepare | calibrate | shift-table"},
    {"preset", "", "named parameter set"},
    {"out", "out", "output directory"},
    {"cutoff", "3", "photon cutoff of every resonator"},
    {"seed", "12345", "seed for random robustness inputs"},
    {"device.omega_ge", nullptr, "GHz"},
    {"device.omega_ef", nullptr, "GHz"},
    {"device.omega_r", nullptr, "GHz, one per resonator"},
    {"device.g_ge", nullptr, "GHz, one per resonator"},
    {"device.g_ef", nullptr, "GHz, one per resonator"},
    {"gate.controls", "1", "1-based resonators coupled during the rotation"},
    {"gate.target", "2", "1-based resonator exchanged with the qutrit"},
    {"gate.first_swap", "0.5", "swap fraction before the rotation"},
    {"gate.last_swap", "0.5", "swap fraction after the rotation"},
    {"gate.ef_during_swap", "true", "keep the e-f coupling during swaps"},
    {"drive.amplitude", nullptr, "e-f drive amplitude"},
    {"drive.amplitude_unit", "ghz", "ghz | ghz_rabi (value is 2x amplitude) | rad_per_ns"},
    {"drive.frequency", nullptr, "reference drive frequency, GHz"},
    {"prep.amplitude", "0.025", "g-e pulse amplitude, GHz"},
    {"calib.half_width", "0.02", "GHz"},
    {"calib.coarse_step", "0.001", "GHz"},
    {"calib.fine_step", "0.0001", "GHz"},
    {"calib.window_samples", "400", "samples per transfer window"},
    {"evolve.max_step", "0.002", "ns"},
    {"evolve.sample_interval", "0.1", "ns"},
    {"evolve.integrator", "exact", "exact | midpoint"},
    {"evolve.frame", "idle", "idle | lab"},
    {"evolve.renormalize", "false", "renormalise after every step"},
    {"rabi.window", "100", "ns"},
    {"rabi.frequency", "reference", "reference | calibrated"},
    {"robustness.inputs", "20", "random inputs for the gate experiments"},
};

const KeySpec* spec_for(const std::string& key) {
  for (const KeySpec& k : kKeys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.data();
  const char* e = b + s.size();
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e && !s.empty();
}

bool parse_int(const std::string& s, int& v) {
  const char* b = s.data();
  const char* e = b + s.size();
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e && !s.empty();
}

}  // namespace

bool Config::known_key(const std::string& key) { return spec_for(key) != nullptr; }

std::vector<std::string> Config::keys() {
  std::vector<std::string> out;
  for (const KeySpec& k : kKeys) out.emplace_back(k.key);
  return out;
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  if (!known_key(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
  entries_[key] = Entry{value, origin};
}

void Config::set_assignment(const std::string& assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(origin + ": expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), origin);
}

void Config::apply_preset(const Preset& preset) {
  for (const auto& [k, v] : preset.values) set(k, v, "preset " + preset.name);
  entries_["preset"] = Entry{preset.name, "preset " + preset.name};
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    set_assignment(line, path.string() + ":" + std::to_string(number));
  }
}

void Config::fail(const std::string& key, const std::string& what) const {
  const auto it = entries_.find(key);
  const std::string origin = it == entries_.end() ? "default" : it->second.origin;
  throw ConfigError(origin + ": key '" + key + "': " + what);
}

std::string Config::text(const std::string& key) const {
  const KeySpec* spec = spec_for(key);
  if (!spec) throw ConfigError("unknown key '" + key + "'");
  const auto it = entries_.find(key);
  if (it != entries_.end()) return it->second.value;
  if (!spec->fallback) throw ConfigError("missing required key '" + key + "' (" + spec->help + ")");
  return spec->fallback;
}

double Config::number(const std::string& key) const {
  double v = 0.0;
  if (!parse_double(text(key), v)) fail(key, "expected a number, got '" + text(key) + "'");
  return v;
}

int Config::integer(const std::string& key) const {
  int v = 0;
  if (!parse_int(text(key), v)) fail(key, "expected an integer, got '" + text(key) + "'");
  return v;
}

bool Config::flag(const std::string& key) const {
  const std::string v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(key, "expected true or false, got '" + v + "'");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : split_list(text(key))) {
    double v = 0.0;
    if (!parse_double(item, v)) fail(key, "expected a comma-separated list of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<int> Config::integers(const std::string& key) const {
  std::vector<int> out;
  for (const std::string& item : split_list(text(key))) {
    int v = 0;
    if (!parse_int(item, v)) fail(key, "expected a comma-separated list of integers");
    out.push_back(v);
  }
  return out;
}

std::map<std::string, std::string> Config::resolved() const {
  std::map<std::string, std::string> out;
  for (const KeySpec& k : kKeys) {
    const auto it = entries_.find(k.key);
    if (it != entries_.end()) {
      out[k.key] = it->second.value;
    } else if (k.fallback) {
      out[k.key] = k.fallback;
    }
  }
  return out;
}

}  // namespace cqed::app
