#include <iomanip>

#include "cqed/app.hpp"
#include "cqed/errors.hpp"

namespace cqed::app {

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"paper-cphase",
       "two resonators, qutrit at 8.7/8.0 GHz; r1 at 7.5 GHz for the selective rotation, r2 at 8.7 GHz for swaps",
       "all values in GHz as printed with omega/(2 pi); the drive value 0.0115 GHz is read as the e-f Rabi "
       "frequency, i.e. twice the coupling amplitude, which reproduces the printed gate time",
       {{"device.omega_ge", "8.7"},
        {"device.omega_ef", "8.0"},
        {"device.omega_r", "7.5,8.7"},
        {"device.g_ge", "0.2,0.2"},
        {"device.g_ef", "0.2,0.2"},
        {"gate.controls", "1"},
        {"gate.target", "2"},
        {"gate.first_swap", "0.5"},
        {"gate.last_swap", "0.5"},
        {"drive.amplitude", "0.0115"},
        {"drive.amplitude_unit", "ghz_rabi"},
        {"drive.frequency", "8.043"}}},
      {"paper-ccphase",
       "three resonators at 6.5/7.5/7.5 GHz; r1 and r2 coupled during the rotation, r3 tuned to 8.7 GHz for swaps",
       "frequencies and couplings in GHz as printed; the drive amplitude 0.0266 is read in rad/ns, which keeps the "
       "four frequency groups resolved and matches the printed gate time; the first swap uses g t = 3 pi/2 so the "
       "stored excitation returns without a residual Z on r3",
       {{"device.omega_ge", "8.7"},
        {"device.omega_ef", "8.0"},
        {"device.omega_r", "6.5,7.5,7.5"},
        {"device.g_ge", "0.2,0.2,0.12"},
        {"device.g_ef", "0.2,0.2,0.12"},
        {"gate.controls", "1,2"},
        {"gate.target", "3"},
        {"gate.first_swap", "1.5"},
        {"gate.last_swap", "0.5"},
        {"drive.amplitude", "0.0266"},
        {"drive.amplitude_unit", "rad_per_ns"},
        {"drive.frequency", "8.1768"}}},
  };
  return list;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void list_presets(std::ostream& os) {
  for (const Preset& p : presets()) {
    os << p.name << "\n  " << p.description << "\n  provenance: " << p.provenance << '\n';
    for (const auto& [k, v] : p.values) os << "    " << std::left << std::setw(22) << k << ' ' << v << '\n';
  }
}

}  // namespace cqed::app
