#pragma once

#include <filesystem>
#include <map>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cqed/protocols.hpp"

namespace cqed::app {

inline constexpr const char* kVersion = "0.3.0";

struct Preset {
  std::string name;
  std::string description;
  std::string provenance;
  std::vector<std::pair<std::string, std::string>> values;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);
void list_presets(std::ostream& os);

/// Flat key=value configuration with strict key checking. Every value keeps
/// the place it came from so errors can point at it.
class Config {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "preset paper-cphase", "run.cfg:4", "--set", ...
  };

  static bool known_key(const std::string& key);
  static std::vector<std::string> keys();

  void set(const std::string& key, const std::string& value, const std::string& origin);
  /// Parses "key=value"; origin is used in error messages.
  void set_assignment(const std::string& assignment, const std::string& origin);
  void apply_preset(const Preset& preset);
  /// Lines of `key = value`; '#' starts a comment. Errors carry file:line.
  void load_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;

  /// Resolved values, defaults included, in key order.
  std::map<std::string, std::string> resolved() const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  std::map<std::string, Entry> entries_;
};

struct RunResult {
  std::vector<std::filesystem::path> files;
};

/// Validates the configuration, runs the experiment and writes its files
/// under `out`. Throws ConfigError before any file is written when the
/// configuration is invalid.
RunResult run(const Config& config, std::ostream& log);

// Pieces exposed for tests.
GateSetup gate_setup(const Config& config);
CompositeSpace space_for(const Config& config, int resonators);
EvolutionConfig evolution_config(const Config& config);
ScanOptions scan_options(const Config& config);

/// 12 significant digits, the precision used for every emitted number.
std::string format_number(double v);
double round12(double v);

/// Uniform [0,1) doubles from the 53 high bits of mt19937_64.
class PortableRandom {
 public:
  explicit PortableRandom(std::uint64_t seed);
  double uniform();
  double normal();  // Box–Muller

 private:
  std::mt19937_64 engine_;
};

std::string sha256_file(const std::filesystem::path& path);

}  // namespace cqed::app
