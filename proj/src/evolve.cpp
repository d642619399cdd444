#include "cqed/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cqed/errors.hpp"

namespace cqed {
namespace {

constexpr double kNormTolerance = 1e-6;

Eigen::VectorXcd phases(const RealVector& generator, double t) {
  Eigen::VectorXcd out(generator.size());
  for (Eigen::Index i = 0; i < generator.size(); ++i) out(i) = std::exp(cplx(0.0, -generator(i) * t));
  return out;
}

double row_sum_bound(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// Per-segment maps between the coordinates handed across segment boundaries
// and the physical state inside the segment.
struct SegmentFrame {
  std::optional<DressedBasis> dressed;
  bool enter_dressed = false;  // x → D x on entry
  bool leave_dressed = false;  // ψ → D† ψ on exit
  std::optional<RealVector> idle_phase_energies;  // removed on exit (rad/ns)

  Matrix enter(const Matrix& x) const { return enter_dressed ? Matrix(dressed->unitary * x) : x; }
  Matrix leave(const Matrix& psi, double duration) const {
    Matrix y = leave_dressed ? Matrix(dressed->unitary.adjoint() * psi) : psi;
    if (idle_phase_energies) y = phases(*idle_phase_energies, -duration).asDiagonal() * y;
    return y;
  }
  Matrix leave_inverse(const Matrix& y, double duration) const {
    Matrix psi = idle_phase_energies ? Matrix(phases(*idle_phase_energies, duration).asDiagonal() * y) : y;
    return leave_dressed ? Matrix(dressed->unitary * psi) : psi;
  }
  Matrix enter_inverse(const Matrix& psi) const {
    return enter_dressed ? Matrix(dressed->unitary.adjoint() * psi) : psi;
  }
};

struct Run {
  const CompositeSpace& space;
  const Schedule& schedule;
  const EvolutionConfig& cfg;
  const std::vector<Monitor>& monitors;
  Trajectory* trajectory = nullptr;
};

void record(const Run& run, const Matrix& psi, double time, const std::optional<DressedBasis>& dressed) {
  if (!run.trajectory) return;
  const Vector v = psi.col(0);
  std::vector<double> row;
  row.reserve(run.monitors.size());
  for (const Monitor& m : run.monitors) {
    if (m.basis == Basis::bare) {
      row.push_back(std::norm(v(m.index)));
    } else {
      row.push_back(std::norm(dressed->unitary.col(m.index).dot(v)));
    }
  }
  run.trajectory->times.push_back(time);
  run.trajectory->populations.push_back(std::move(row));
  if (run.cfg.record_states) run.trajectory->states.push_back(v);
}

void renormalize(Matrix& x) {
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double n = x.col(c).norm();
    if (n > 0.0) x.col(c) /= n;
  }
}

Matrix run_schedule(const Run& run, Matrix x) {
  const auto& cfg = run.cfg;
  const auto& schedule = run.schedule;
  const RealVector initial_norms = x.colwise().norm();
  const double total = schedule.total_duration();
  const double interval = cfg.sample_interval;
  const std::size_t rows = run.trajectory ? sample_count(total, interval) : 0;
  const double eps = 1e-9 * std::max(1.0, total);
  std::size_t next_sample = 0;

  std::vector<int> dressed_monitors;
  for (const Monitor& m : run.monitors) {
    if (m.basis == Basis::dressed) dressed_monitors.push_back(m.index);
  }

  double elapsed = 0.0;
  for (std::size_t s = 0; s < schedule.segments.size(); ++s) {
    const Segment& seg = schedule.segments[s];
    const SegmentPropagator prop(seg, run.space, cfg.integrator);
    if (seg.drive.active && prop.generator_bound() * cfg.max_step >= cfg.max_phase_per_step) {
      std::ostringstream os;
      os << "max_step " << cfg.max_step << " ns too large for segment '" << seg.label << "': bound "
         << prop.generator_bound() * cfg.max_step << " rad per step >= " << cfg.max_phase_per_step;
      throw ConfigError(os.str());
    }

    SegmentFrame frame;
    const bool initial_dressed = s == 0 && schedule.initial_frame == Basis::dressed;
    const bool adiabatic = seg.switching == Switching::adiabatic;
    if (adiabatic || initial_dressed) {
      frame.dressed = dressed_basis(seg.params, run.space);
    } else if (!dressed_monitors.empty() && rows > 0) {
      frame.dressed = dressed_basis(seg.params, run.space, dressed_monitors);
    }
    frame.enter_dressed = adiabatic || (initial_dressed && !seg.reversed);
    frame.leave_dressed = adiabatic;
    if (cfg.frame == Frame::idle) {
      frame.idle_phase_energies = adiabatic ? frame.dressed->energies : bare_energies(seg.params, run.space);
    }

    // Physical time runs forward through the segment, or backward when reversed.
    const double t_start = seg.reversed ? seg.drive_time_origin + seg.duration : seg.drive_time_origin;
    const double direction = seg.reversed ? -1.0 : 1.0;
    auto physical_time = [&](double local) { return t_start + direction * local; };

    Matrix psi0 = seg.reversed ? frame.leave_inverse(x, seg.duration) : frame.enter(x);
    if (s == 0 && next_sample < rows) {
      record(run, psi0, 0.0, frame.dressed);
      ++next_sample;
    }

    // Break points inside the segment at which samples are due.
    std::vector<double> stops;
    while (next_sample < rows) {
      const double t = static_cast<double>(next_sample) * interval;
      if (t > elapsed + seg.duration + eps && s + 1 < schedule.segments.size()) break;
      stops.push_back(std::clamp(t - elapsed, 0.0, seg.duration));
      ++next_sample;
      if (t > elapsed + seg.duration + eps) break;
    }
    const std::size_t sample_stops = stops.size();
    stops.push_back(seg.duration);

    Matrix psi = psi0;
    double local = 0.0;
    for (std::size_t k = 0; k < stops.size(); ++k) {
      const double target = stops[k];
      if (cfg.integrator == Integrator::exact) {
        psi = prop.evolve(psi0, physical_time(0.0), physical_time(target));
        if (cfg.renormalize_each_step) renormalize(psi);
      } else if (target > local) {
        const double span = target - local;
        const int steps = std::max(1, static_cast<int>(std::ceil(span / cfg.max_step - 1e-9)));
        const double dt = direction * span / steps;
        const Matrix step = prop.step_matrix(dt);
        for (int j = 0; j < steps; ++j) {
          psi = prop.midpoint_step(psi, step, physical_time(local) + j * dt, dt);
          if (cfg.renormalize_each_step) renormalize(psi);
        }
      }
      local = target;
      if (k < sample_stops) record(run, psi, elapsed + target, frame.dressed);
    }

    x = seg.reversed ? frame.enter_inverse(psi) : frame.leave(psi, seg.duration);
    const double drift = (x.colwise().norm() - initial_norms.transpose()).cwiseAbs().maxCoeff();
    if (drift > kNormTolerance) {
      std::ostringstream os;
      os << "norm drift " << drift << " exceeds " << kNormTolerance << " after segment '" << seg.label << "'";
      throw IntegrationError(os.str());
    }
    elapsed += seg.duration;
  }
  return x;
}

}  // namespace

void Segment::validate(const CompositeSpace& space) const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("segment '" + label + "' needs duration > 0");
  params.validate();
  if (params.resonator_count() != space.resonator_count()) {
    throw ConfigError("segment '" + label + "' parameters do not match the space");
  }
  drive.validate();
}

void Schedule::append(Segment segment) {
  segment.drive_time_origin = total_duration();
  segments.push_back(std::move(segment));
}

double Schedule::total_duration() const {
  double t = 0.0;
  for (const Segment& s : segments) t += s.duration;
  return t;
}

void Schedule::validate(const CompositeSpace& space) const {
  for (const Segment& s : segments) s.validate(space);
  if (initial_frame == Basis::dressed && !segments.empty() &&
      segments.front().switching == Switching::adiabatic) {
    throw ConfigError("dressed initial frame conflicts with an adiabatic first segment");
  }
}

Schedule time_reversed(const Schedule& schedule) {
  Schedule out;
  out.initial_frame = Basis::bare;
  for (auto it = schedule.segments.rbegin(); it != schedule.segments.rend(); ++it) {
    Segment s = *it;
    s.reversed = !s.reversed;
    if (!s.label.empty()) s.label += "~";
    out.segments.push_back(std::move(s));
  }
  return out;
}

Schedule concatenate(const Schedule& a, const Schedule& b) {
  Schedule out = a;
  out.segments.insert(out.segments.end(), b.segments.begin(), b.segments.end());
  return out;
}

void EvolutionConfig::validate() const {
  if (!(max_step > 0.0) || !std::isfinite(max_step)) throw ConfigError("max_step must be positive");
  if (!(sample_interval >= 0.0) || !std::isfinite(sample_interval)) {
    throw ConfigError("sample_interval must be non-negative");
  }
  if (!(max_phase_per_step > 0.0)) throw ConfigError("max_phase_per_step must be positive");
}

std::size_t sample_count(double total_duration, double sample_interval) {
  if (sample_interval <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(total_duration / sample_interval + 1e-9)) + 1;
}

SegmentPropagator::SegmentPropagator(const Segment& segment, const CompositeSpace& space, Integrator integrator)
    : excitation_(excitation_diagonal(space)) {
  Matrix h0 = build_static(segment.params, space).matrix();
  if (segment.drive.active) {
    wd_ = angular(segment.drive.frequency);
    const Matrix up = angular(segment.drive.amplitude) * std::exp(cplx(0.0, -segment.drive.phase)) *
                      drive_raising(space, segment.drive.transition).matrix();
    h0 += up + up.adjoint();
  }
  Matrix k = h0;
  k.diagonal() -= (wd_ * excitation_).cast<cplx>();
  generator_bound_ = row_sum_bound(k);
  Eigen::SelfAdjointEigenSolver<Matrix> ek(k);
  k_vectors_ = ek.eigenvectors();
  k_values_ = ek.eigenvalues();
  if (integrator == Integrator::midpoint) {
    Eigen::SelfAdjointEigenSolver<Matrix> eh(h0);
    h_vectors_ = eh.eigenvectors();
    h_values_ = eh.eigenvalues();
  }
}

Matrix SegmentPropagator::evolve(const Matrix& columns, double t_a, double t_b) const {
  Matrix y = phases(excitation_ * wd_, -t_a).asDiagonal() * columns;
  y = k_vectors_.adjoint() * y;
  y = phases(k_values_, t_b - t_a).asDiagonal() * y;
  y = k_vectors_ * y;
  return phases(excitation_ * wd_, t_b).asDiagonal() * y;
}

Vector SegmentPropagator::evolve(const Vector& psi, double t_a, double t_b) const {
  return evolve(Matrix(psi), t_a, t_b).col(0);
}

Matrix SegmentPropagator::unitary(double t_a, double t_b) const {
  const Matrix id = Matrix::Identity(excitation_.size(), excitation_.size());
  return evolve(id, t_a, t_b);
}

Matrix SegmentPropagator::step_matrix(double dt) const {
  if (h_vectors_.size() == 0) throw ConfigError("propagator was not prepared for the midpoint integrator");
  return h_vectors_ * phases(h_values_, dt).asDiagonal() * h_vectors_.adjoint();
}

Matrix SegmentPropagator::midpoint_step(const Matrix& columns, const Matrix& step, double t, double dt) const {
  const double tm = t + 0.5 * dt;
  const Eigen::VectorXcd r = phases(excitation_ * wd_, tm);
  return r.asDiagonal() * (step * (r.conjugate().asDiagonal() * columns));
}

Propagation propagate(const StateVector& psi, const Schedule& schedule, const EvolutionConfig& cfg,
                      const std::vector<Monitor>& monitors) {
  cfg.validate();
  schedule.validate(psi.space());
  for (const Monitor& m : monitors) {
    if (m.index < 0 || m.index >= psi.space().dimension()) throw ConfigError("monitor index out of range");
  }
  Propagation out;
  for (const Monitor& m : monitors) out.trajectory.names.push_back(m.name);
  const Run run{psi.space(), schedule, cfg, monitors, cfg.sample_interval > 0.0 ? &out.trajectory : nullptr};
  const Matrix x = run_schedule(run, Matrix(psi.amplitudes()));
  out.state = x.col(0);
  out.norm_drift = std::abs(out.state.norm() - psi.norm());
  return out;
}

Matrix propagate_columns(const CompositeSpace& space, const Matrix& columns, const Schedule& schedule,
                         const EvolutionConfig& cfg) {
  cfg.validate();
  schedule.validate(space);
  if (columns.rows() != space.dimension()) throw ConfigError("column length does not match the space");
  static const std::vector<Monitor> none;
  EvolutionConfig quiet = cfg;
  quiet.sample_interval = 0.0;
  const Run run{space, schedule, quiet, none, nullptr};
  return run_schedule(run, columns);
}

}  // namespace cqed
