#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqed/hamiltonian.hpp"
#include "cqed/hilbert.hpp"

namespace cqed {

/// How a segment is entered and left. Adiabatic segments map bare coordinates
/// onto the dressed states of their static Hamiltonian on entry and back on exit.
enum class Switching { sudden, adiabatic };

enum class Basis { bare, dressed };

struct Segment {
  double duration = 0.0;  // ns
  SystemParams params;
  DriveParams drive;
  double drive_time_origin = 0.0;  // global time at segment start, ns
  Switching switching = Switching::sudden;
  bool reversed = false;  // run the inverse map of this segment
  std::string label;

  void validate(const CompositeSpace& space) const;
};

struct Schedule {
  std::vector<Segment> segments;
  Basis initial_frame = Basis::bare;

  /// Appends with drive_time_origin set to the current total duration.
  void append(Segment segment);
  double total_duration() const;
  void validate(const CompositeSpace& space) const;
};

/// Segments in reverse order, each marked reversed, origins kept.
Schedule time_reversed(const Schedule& schedule);
/// `a` followed by `b`, each segment keeping its own drive_time_origin.
Schedule concatenate(const Schedule& a, const Schedule& b);

enum class Integrator {
  exact,     // closed-form propagator in the frame rotating with the drive
  midpoint,  // exponential midpoint rule, exp(-i H(t+dt/2) dt) per step
};

/// Coordinates handed between segments. `idle` removes each segment's own
/// free evolution (the bare diagonal energies for sudden segments, the dressed
/// energies for adiabatic ones), so a segment that does nothing is the identity.
enum class Frame { lab, idle };

struct EvolutionConfig {
  double max_step = 0.002;       // ns
  double sample_interval = 0.0;  // ns; 0 disables sampling
  Integrator integrator = Integrator::exact;
  bool renormalize_each_step = false;
  Frame frame = Frame::idle;
  bool record_states = false;
  double max_phase_per_step = 0.5;  // rad

  void validate() const;
};

struct Monitor {
  Basis basis = Basis::bare;
  int index = 0;
  std::string name;
};

struct Trajectory {
  std::vector<std::string> names;
  std::vector<double> times;
  std::vector<std::vector<double>> populations;  // [sample][monitor]
  std::vector<Vector> states;                    // physical states, if recorded

  std::size_t size() const { return times.size(); }
};

struct Propagation {
  Vector state;
  Trajectory trajectory;
  double norm_drift = 0.0;
};

/// Number of trajectory rows for a schedule of the given length.
std::size_t sample_count(double total_duration, double sample_interval);

/// Closed-form propagator of one segment. With R(t) = exp(-i ω_d N t) the
/// driven Hamiltonian is R(t) H₀ R(t)†, so U(t_b, t_a) = R(t_b) exp(-i(H₀ − ω_d N)(t_b − t_a)) R(t_a)†.
class SegmentPropagator {
 public:
  SegmentPropagator(const Segment& segment, const CompositeSpace& space, Integrator integrator = Integrator::exact);

  /// Maps the state at global time t_a to global time t_b (either order).
  Vector evolve(const Vector& psi, double t_a, double t_b) const;
  Matrix evolve(const Matrix& columns, double t_a, double t_b) const;
  Matrix unitary(double t_a, double t_b) const;

  /// exp(-i H₀ dt), the drive-frame factor of one midpoint step.
  Matrix step_matrix(double dt) const;
  /// One exponential-midpoint step from t to t + dt (dt may be negative), with
  /// `step` = step_matrix(dt).
  Matrix midpoint_step(const Matrix& columns, const Matrix& step, double t, double dt) const;

  /// Row-sum bound on the generator that the midpoint rule samples, rad/ns.
  double generator_bound() const { return generator_bound_; }
  double drive_frequency() const { return wd_; }
  /// Eigenpairs of H₀ − ω_d N.
  const Matrix& frame_vectors() const { return k_vectors_; }
  const RealVector& frame_values() const { return k_values_; }

 private:
  RealVector excitation_;
  double wd_ = 0.0;
  Matrix k_vectors_;  // eigenvectors of H₀ − ω_d N
  RealVector k_values_;
  Matrix h_vectors_;  // eigenvectors of H₀, midpoint only
  RealVector h_values_;
  double generator_bound_ = 0.0;
};

/// Time-ordered evolution of `psi` through the schedule.
Propagation propagate(const StateVector& psi, const Schedule& schedule, const EvolutionConfig& cfg,
                      const std::vector<Monitor>& monitors = {});

/// Evolves every column independently (no sampling); used for truth tables.
Matrix propagate_columns(const CompositeSpace& space, const Matrix& columns, const Schedule& schedule,
                         const EvolutionConfig& cfg);

}  // namespace cqed
