#include "satfr/time_domain_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

namespace satfr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using State = std::array<double, 2>;  // follower position, raw velocity

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Clamped closed loop with a sinusoidal leader; clamps act inside the
// right-hand side so every RK4 stage sees the saturated signals.
class Loop {
 public:
  Loop(const Scenario& sc, double omega) : k_(sc.gains), l_(sc.limits), R_(sc.leader_amplitude), w_(omega) {}

  double leader(double t) const { return R_ * std::sin(w_ * t); }
  double applied_velocity(double v) const { return clamp(v, l_.vt_min, l_.vt_max); }
  double command(const State& x, double t) const {
    return k_.k1 * (leader(t) - x[0]) + k_.k2 * R_ * w_ * std::cos(w_ * t) + k_.k3 * applied_velocity(x[1]);
  }
  double applied_accel(const State& x, double t) const { return clamp(command(x, t), l_.a_min, l_.a_max); }
  bool accel_clipped(const State& x, double t) const {
    const double a = command(x, t);
    return a < l_.a_min || a > l_.a_max;
  }
  bool speed_clipped(const State& x) const { return x[1] < l_.vt_min || x[1] > l_.vt_max; }

  void operator()(const State& x, State& dxdt, double t) const {
    dxdt[0] = applied_velocity(x[1]);
    dxdt[1] = applied_accel(x, t);
  }

 private:
  ControllerGains k_;
  SaturationLimits l_;
  double R_;
  double w_;
};

class Integrator {
 public:
  Integrator(const Loop& loop, State x0, double dt) : loop_(loop), x_(x0), dt_(dt) {}

  void step() {
    stepper_.do_step(std::cref(loop_), x_, time(), dt_);
    ++steps_;
    if (!std::isfinite(x_[0]) || !std::isfinite(x_[1])) throw DivergenceError(steps_);
  }

  double time() const { return static_cast<double>(steps_) * dt_; }
  const State& state() const { return x_; }
  const Loop& loop() const { return loop_; }

 private:
  Loop loop_;
  State x_;
  double dt_;
  long long steps_ = 0;
  boost::numeric::odeint::runge_kutta4<State> stepper_;
};

void check_step(double omega, const SolverSettings& s) {
  if (!(std::isfinite(omega) && omega > 0.0)) throw ValidationError("omega", "must be finite and > 0");
  const double bound = std::min(0.01, 0.001 * kTwoPi / omega);
  if (!(s.dt > 0.0) || s.dt > bound * (1.0 + 1e-12)) {
    throw ValidationError("solver.dt", "must be > 0 and <= min(0.01, 0.001 * period)");
  }
}

long long steps_per_period(double omega, const SolverSettings& s) {
  return static_cast<long long>(std::ceil(kTwoPi / omega / s.dt - 1e-9));
}

std::complex<double> phasor(const HarmonicFit& f) { return std::polar(f.amplitude, f.phase); }

}  // namespace

double effective_step(double omega, const SolverSettings& settings) {
  return kTwoPi / omega / static_cast<double>(steps_per_period(omega, settings));
}

SimTrajectory simulate(const Scenario& sc, double omega, const SolverSettings& s, const SimOptions& opt) {
  check_step(omega, s);
  if (opt.record_stride == 0) throw ValidationError("record_stride", "must be >= 1");
  const double dt = effective_step(omega, s);
  const double duration = opt.duration > 0.0 ? opt.duration : (s.settle_periods + s.measure_periods) * kTwoPi / omega;
  const long long total = static_cast<long long>(std::llround(std::ceil(duration / dt - 1e-9)));

  Integrator integ(Loop(sc, omega), {opt.initial_position, opt.initial_velocity}, dt);
  SimTrajectory tr;
  tr.dt = dt * static_cast<double>(opt.record_stride);
  const std::size_t expected = static_cast<std::size_t>(total) / opt.record_stride + 1;
  for (auto* v : {&tr.t, &tr.leader, &tr.follower, &tr.velocity, &tr.applied_velocity, &tr.acceleration}) {
    v->reserve(expected);
  }
  auto record = [&] {
    const State& x = integ.state();
    const double t = integ.time();
    tr.t.push_back(t);
    tr.leader.push_back(integ.loop().leader(t));
    tr.follower.push_back(x[0]);
    tr.velocity.push_back(x[1]);
    tr.applied_velocity.push_back(integ.loop().applied_velocity(x[1]));
    tr.acceleration.push_back(integ.loop().applied_accel(x, t));
  };
  record();
  for (long long k = 1; k <= total; ++k) {
    integ.step();
    if (k % static_cast<long long>(opt.record_stride) == 0) record();
  }
  return tr;
}

HarmonicFit fit_first_harmonic(std::span<const double> y, double t0, double dt, double omega) {
  if (y.size() < 3) throw ValidationError("window", "needs at least three samples");
  const std::size_t n = y.size() - 1;
  const double span = dt * static_cast<double>(n);
  double s_sin = 0.0;
  double s_cos = 0.0;
  double s_y = 0.0;
  double s_yy = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
    const double ph = omega * (t0 + dt * static_cast<double>(i));
    s_sin += wgt * y[i] * std::sin(ph);
    s_cos += wgt * y[i] * std::cos(ph);
    s_y += wgt * y[i];
    s_yy += wgt * y[i] * y[i];
  }
  const double y11 = 2.0 * s_sin * dt / span;
  const double y12 = 2.0 * s_cos * dt / span;
  const double mean = s_y * dt / span;
  const double variance = s_yy * dt / span - mean * mean;
  HarmonicFit f;
  f.amplitude = std::hypot(y11, y12);
  f.phase = std::atan2(y12, y11);
  const double harmonic = 0.5 * f.amplitude * f.amplitude;
  f.residual_fraction = variance > 0.0 ? std::clamp(1.0 - harmonic / variance, 0.0, 1.0) : 0.0;
  return f;
}

HarmonicFit extract_first_harmonic(const SimTrajectory& tr, double omega, double window) {
  if (!(omega > 0.0)) throw ValidationError("omega", "must be > 0");
  if (tr.size() < 2 || !(tr.dt > 0.0)) throw ValidationError("trajectory", "needs uniform samples");
  const double periods = window * omega / kTwoPi;
  const double whole = std::round(periods);
  if (!(whole >= 1.0) || std::abs(periods - whole) > 1e-9 * whole) {
    throw ValidationError("window", "must be a positive integer number of periods");
  }
  const double steps = window / tr.dt;
  const double n = std::round(steps);
  if (std::abs(steps - n) > 1e-6 * std::max(1.0, n)) {
    throw ValidationError("window", "must span an integer number of samples");
  }
  const std::size_t count = static_cast<std::size_t>(n) + 1;
  if (count > tr.size()) throw ValidationError("window", "longer than the trajectory");
  const std::size_t first = tr.size() - count;
  return fit_first_harmonic(std::span<const double>(tr.follower).subspan(first, count), tr.t[first], tr.dt, omega);
}

NonConvergence::NonConvergence(const HarmonicFit& previous, const HarmonicFit& last, int periods)
    : Error("no steady state after " + std::to_string(periods) + " periods: amplitude " +
            std::to_string(previous.amplitude) + " -> " + std::to_string(last.amplitude)),
      previous_(previous),
      last_(last),
      periods_(periods) {}

SimEstimate estimate_frequency_response(const Scenario& sc, double omega, const SolverSettings& s) {
  if (!(sc.leader_amplitude > 0.0)) throw UndefinedResponse("frequency response is undefined for R = 0");
  check_step(omega, s);
  const long long per = steps_per_period(omega, s);
  const double dt = effective_step(omega, s);
  Integrator integ(Loop(sc, omega), {0.0, 0.0}, dt);

  SimEstimate est;
  auto run_period = [&](std::vector<double>& ys, bool keep, bool track) {
    const double t0 = integ.time();
    if (!keep) ys.clear();
    if (ys.empty()) ys.push_back(integ.state()[0]);
    for (long long k = 0; k < per; ++k) {
      integ.step();
      ys.push_back(integ.state()[0]);
      if (track) {
        est.accel_clipped = est.accel_clipped || integ.loop().accel_clipped(integ.state(), integ.time());
        est.speed_clipped = est.speed_clipped || integ.loop().speed_clipped(integ.state());
      }
    }
    return t0;
  };

  std::vector<double> ys;
  HarmonicFit prev;
  HarmonicFit last;
  int periods = 0;
  bool steady = false;
  for (; periods < s.settle_periods; ++periods) {
    prev = last;
    const double t0 = run_period(ys, false, false);
    last = fit_first_harmonic(ys, t0, dt, omega);
  }
  // A slow transient can make two fits agree at a turning point, so the
  // agreement has to hold for measure_periods consecutive pairs.
  int streak = 0;
  while (true) {
    const bool agree = std::abs(phasor(last) - phasor(prev)) <= kSteadyStateTolerance * std::abs(phasor(last));
    streak = agree ? streak + 1 : 0;
    if (streak >= s.measure_periods) {
      steady = true;
      break;
    }
    if (periods + s.measure_periods >= s.max_periods) break;
    prev = last;
    const double t0 = run_period(ys, false, false);
    last = fit_first_harmonic(ys, t0, dt, omega);
    ++periods;
  }
  if (!steady) throw NonConvergence(prev, last, periods);

  std::vector<double> meas;
  const double t_start = integ.time();
  for (int m = 0; m < s.measure_periods; ++m, ++periods) run_period(meas, true, true);
  est.fit = fit_first_harmonic(meas, t_start, dt, omega);
  est.periods_simulated = periods;
  est.point.omega = omega;
  est.point.magnitude = est.fit.amplitude / sc.leader_amplitude;
  est.point.phase = principal_angle(est.fit.phase);
  est.point.phase_unwrapped = est.point.phase;
  est.point.method = ResponseMethod::Simulation;
  return est;
}

DecayReport decay_check(const Scenario& sc, double initial_offset, const SolverSettings& s, double horizon) {
  if (sc.leader_amplitude != 0.0) throw ValidationError("leader_amplitude", "decay check requires R = 0");
  if (!(horizon > 0.0)) throw ValidationError("horizon", "must be > 0");
  if (!(s.dt > 0.0 && s.dt <= 0.01)) throw ValidationError("solver.dt", "must be in (0, 0.01]");
  const long long total = static_cast<long long>(std::ceil(horizon / s.dt - 1e-9));
  const long long tail_start = total - total / 10;
  Integrator integ(Loop(sc, 1.0), {initial_offset, 0.0}, s.dt);
  DecayReport rep;
  rep.initial_offset = initial_offset;
  rep.horizon = static_cast<double>(total) * s.dt;
  rep.threshold = 1e-3 * std::abs(initial_offset);
  for (long long k = 1; k <= total; ++k) {
    integ.step();
    if (k >= tail_start) rep.final_envelope = std::max(rep.final_envelope, std::abs(integ.state()[0]));
  }
  rep.passed = rep.final_envelope <= rep.threshold;
  return rep;
}

void write_trajectory_csv(const SimTrajectory& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "t,leader,follower,velocity,applied_velocity,acceleration\n";
  char buf[256];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", tr.t[i], tr.leader[i], tr.follower[i],
                  tr.velocity[i], tr.applied_velocity[i], tr.acceleration[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace satfr
