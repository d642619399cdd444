#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed {

/// 2π. Stored frequencies are ordinary (GHz); assembly multiplies by this once
/// to obtain angular frequencies in rad/ns.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double angular(double ghz) { return kTwoPi * ghz; }

enum class Transition { ge, ef };

std::string to_string(Transition t);

struct SystemParams {
  double omega_ge = 0.0;
  double omega_ef = 0.0;
  std::vector<double> omega_r;
  std::vector<double> g_ge;
  std::vector<double> g_ef;
  std::vector<bool> coupling_on;
  double energy_offset = 0.0;  // GHz added to every level; only shifts the global phase

  int resonator_count() const { return static_cast<int>(omega_r.size()); }

  /// Throws ConfigError on non-positive frequencies, negative couplings or
  /// ragged per-resonator lists.
  void validate() const;

  /// One message per active coupling whose (g/Δ)² exceeds 0.1.
  std::vector<std::string> dispersive_warnings() const;

  SystemParams with_couplings(std::vector<bool> on) const;
  SystemParams with_resonator_frequency(int resonator, double ghz) const;
};

struct DriveParams {
  double amplitude = 0.0;  // GHz, same convention as couplings
  double frequency = 0.0;  // GHz
  Transition transition = Transition::ef;
  double phase = 0.0;  // rad, H_d ∝ e^{-i(ω_d t + phase)} σ⁺
  bool active = false;

  void validate() const;
};

/// Σ_l E_l|l><l| + Σ_i [ω_i a†a + g_ge(a†σ_ge⁻ + h.c.) + g_ef(a†σ_ef⁻ + h.c.)]
/// in rad/ns, couplings only where coupling_on. Hermitian by construction.
Operator build_static(const SystemParams& params, const CompositeSpace& space);

/// Diagonal energies of the uncoupled Hamiltonian (rad/ns).
RealVector bare_energies(const SystemParams& params, const CompositeSpace& space);

/// Σ n_i + |e><e| + 2|f><f|.
Operator excitation_number(const CompositeSpace& space);
RealVector excitation_diagonal(const CompositeSpace& space);

/// Raising operator of the driven transition.
Operator drive_raising(const CompositeSpace& space, Transition transition);

/// t ↦ Ω(σ⁺e^{-i(ω_d t+φ)} + h.c.), angular units. Requires drive.active.
std::function<Matrix(double)> build_drive(const DriveParams& drive, const CompositeSpace& space);

/// (g²/Δ)(2n+1), all in GHz.
double dispersive_shift_two_level(double g, double delta, int n);

/// Two-level Jaynes–Cummings Hamiltonian on qubit ⊗ Fock(0..cutoff), qubit
/// index most significant, rad/ns.
Matrix build_two_level_jc(double omega_q, double omega_r, double g, int cutoff);

/// Exact photon-number-dependent qubit frequency shift ω_q'(n) − ω_q (GHz)
/// from diagonalising build_two_level_jc. Requires cutoff ≥ n + 1.
double exact_two_level_shift(double omega_q, double omega_r, double g, int n, int cutoff);

struct DispersiveCheck {
  double perturbative = 0.0;
  double exact = 0.0;
  double relative_error = 0.0;
  double bound = 0.0;  // 3(g/Δ)²
  bool within_bound() const { return relative_error <= bound; }
};

DispersiveCheck check_dispersive_shift(double g, double delta, int n, int cutoff);

/// Second-order e↔f frequency with resonators ra and rb dispersively coupled (GHz).
double cc_shift(const SystemParams& params, int n1, int n2, int ra = 0, int rb = 1);
/// N = 2 n1 + 6 n2.
int cc_group_index(int n1, int n2);
/// |3 g_a²/Δ_a − g_b²/Δ_b| / (g_b²/Δ_b) with e↔f couplings and detunings.
double ratio_condition_residual(const SystemParams& params, int ra = 0, int rb = 1);

struct DressedBasis {
  Matrix unitary;       // column k is the dressed state connected to bare state k
  RealVector energies;  // rad/ns
  RealVector overlaps;  // |<k|dressed k>|²
};

/// Eigenbasis of build_static matched to bare states by maximum overlap, each
/// column phased so its bare component is positive real. Only the `relevant`
/// bare indices (all when empty) are required to have overlap ≥ 0.5.
DressedBasis dressed_basis(const SystemParams& params, const CompositeSpace& space,
                           std::span<const int> relevant = {});

/// Exact dressed transition frequency (GHz) for the given photon configuration.
double dressed_frequency(const SystemParams& params, const CompositeSpace& space, Transition transition,
                         std::span<const int> photons);

}  // namespace cqed
