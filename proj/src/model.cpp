#include "satfr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "satfr/errors.hpp"

namespace satfr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ValidationError(field, rule);
}

}  // namespace

ControllerGains derive_loop_gains(double k_d, double k_v, double tau) {
  require(std::isfinite(k_d) && k_d > 0.0, "controller.k_d", "must be finite and > 0");
  require(std::isfinite(k_v) && k_v > 0.0, "controller.k_v", "must be finite and > 0");
  require(std::isfinite(tau) && tau >= 0.0, "controller.tau", "must be finite and >= 0");
  ControllerGains g;
  g.k_d = k_d;
  g.k_v = k_v;
  g.tau = tau;
  g.k1 = k_d;
  g.k2 = k_v;
  g.k3 = -k_v - k_d * tau;
  return g;
}

SaturationLimits::SaturationLimits()
    : a_min(-kInf), a_max(kInf), v_min(-kInf), v_max(kInf), v_e(0.0), vt_min(-kInf), vt_max(kInf) {}

double SaturationLimits::accel_bound() const { return std::min(-a_min, a_max); }
double SaturationLimits::speed_bound() const { return std::min(-vt_min, vt_max); }

bool SaturationLimits::accel_asymmetric() const { return accel_active && a_max != -a_min; }
bool SaturationLimits::speed_asymmetric() const { return speed_active && vt_max != -vt_min; }

std::pair<double, double> derive_oscillatory_limits(double v_min, double v_max, double v_e) {
  require(std::isfinite(v_min) && std::isfinite(v_max) && std::isfinite(v_e), "limits.speed",
          "speeds must be finite");
  require(v_min <= v_e && v_e <= v_max, "limits.speed.v_e", "must lie within [v_min, v_max]");
  return {v_min - v_e, v_max - v_e};
}

SaturationLimits make_accel_limits(double a_min, double a_max) {
  require(std::isfinite(a_min) && a_min < 0.0, "limits.accel.a_min", "must be finite and < 0");
  require(std::isfinite(a_max) && a_max > 0.0, "limits.accel.a_max", "must be finite and > 0");
  SaturationLimits l;
  l.a_min = a_min;
  l.a_max = a_max;
  l.accel_active = true;
  return l;
}

SaturationLimits make_speed_limits(double v_min, double v_max, double v_e) {
  auto [vt_min, vt_max] = derive_oscillatory_limits(v_min, v_max, v_e);
  // A zero-width side would pin the oscillatory speed at a bound; the
  // describing function needs lo < 0 < hi.
  require(vt_min < 0.0, "limits.speed.v_min", "must be strictly below v_e");
  require(vt_max > 0.0, "limits.speed.v_max", "must be strictly above v_e");
  SaturationLimits l;
  l.v_min = v_min;
  l.v_max = v_max;
  l.v_e = v_e;
  l.vt_min = vt_min;
  l.vt_max = vt_max;
  l.speed_active = true;
  return l;
}

SaturationLimits make_limits(double a_min, double a_max, double v_min, double v_max, double v_e) {
  SaturationLimits l = make_speed_limits(v_min, v_max, v_e);
  const SaturationLimits a = make_accel_limits(a_min, a_max);
  l.a_min = a.a_min;
  l.a_max = a.a_max;
  l.accel_active = true;
  return l;
}

SaturationLimits no_limits() { return SaturationLimits{}; }

LoopConfig classify_loop(const SaturationLimits& limits) {
  if (limits.accel_active && limits.speed_active) return LoopConfig::Both;
  if (limits.accel_active) return LoopConfig::ControlOnly;
  if (limits.speed_active) return LoopConfig::StateOnly;
  return LoopConfig::Linear;
}

std::string to_string(LoopConfig loop) {
  switch (loop) {
    case LoopConfig::ControlOnly:
      return "control_only";
    case LoopConfig::StateOnly:
      return "state_only";
    case LoopConfig::Both:
      return "both";
    case LoopConfig::Linear:
      return "linear";
  }
  return "unknown";
}

void validate(const SolverSettings& s) {
  require(std::isfinite(s.b_ini_max) && s.b_ini_max >= 0.0, "solver.b_ini_max",
          "must be >= 0 (0 selects the automatic ceiling)");
  require(s.sweep_points >= 50, "solver.sweep_points", "must be >= 50");
  require(std::isfinite(s.root_tol) && s.root_tol > 0.0, "solver.root_tol", "must be > 0");
  require(s.theta_samples >= 128, "solver.theta_samples", "must be >= 128");
  require(std::isfinite(s.dt) && s.dt > 0.0, "solver.dt", "must be > 0");
  require(s.settle_periods > 0, "solver.settle_periods", "must be > 0");
  require(s.measure_periods > 0, "solver.measure_periods", "must be > 0");
  require(s.max_periods >= s.settle_periods + s.measure_periods, "solver.max_periods",
          "must be >= settle_periods + measure_periods");
}

void validate(const Scenario& sc) {
  const ControllerGains& g = sc.gains;
  require(g.k_d > 0.0 && g.k_v > 0.0 && g.tau >= 0.0, "controller", "k_d > 0, k_v > 0, tau >= 0");
  require(g.k1 == g.k_d && g.k2 == g.k_v && g.k3 == -g.k_v - g.k_d * g.tau, "controller",
          "derived gains inconsistent with k_d, k_v, tau");

  const SaturationLimits& l = sc.limits;
  if (l.accel_active) {
    require(l.a_min < 0.0 && 0.0 < l.a_max && std::isfinite(l.a_min) && std::isfinite(l.a_max),
            "limits.accel", "a_min < 0 < a_max");
  } else {
    require(l.a_min == -kInf && l.a_max == kInf, "limits.accel", "inactive bounds must be infinite");
  }
  if (l.speed_active) {
    require(l.v_min <= l.v_e && l.v_e <= l.v_max, "limits.speed.v_e", "must lie within [v_min, v_max]");
    require(l.vt_min == l.v_min - l.v_e && l.vt_max == l.v_max - l.v_e, "limits.speed",
            "oscillatory bounds inconsistent with v_min, v_max, v_e");
    require(l.vt_min < 0.0 && l.vt_max > 0.0, "limits.speed", "vt_min < 0 < vt_max");
  } else {
    require(l.vt_min == -kInf && l.vt_max == kInf, "limits.speed", "inactive bounds must be infinite");
  }

  require(std::isfinite(sc.leader_amplitude) && sc.leader_amplitude >= 0.0, "leader_amplitude",
          "must be finite and >= 0");
  require(std::isfinite(sc.frequency_floor_hz) && sc.frequency_floor_hz > 0.0, "frequency_floor_hz",
          "must be > 0");
  require(!sc.freq_grid_hz.empty(), "frequency_grid", "must not be empty");
  for (std::size_t i = 0; i < sc.freq_grid_hz.size(); ++i) {
    const double f = sc.freq_grid_hz[i];
    require(std::isfinite(f) && f > 0.0, "frequency_grid", "frequencies must be finite and > 0");
    require(f >= sc.frequency_floor_hz, "frequency_grid", "frequency below the configured floor");
    if (i > 0) require(f > sc.freq_grid_hz[i - 1], "frequency_grid", "must be strictly increasing");
  }
  require(std::isfinite(sc.standstill_distance), "standstill_distance", "must be finite");
  validate(sc.solver);
}

std::vector<std::string> scenario_warnings(const Scenario& sc) {
  std::vector<std::string> w;
  if (sc.limits.accel_asymmetric()) w.emplace_back("asymmetric_accel_limits");
  if (sc.limits.speed_asymmetric()) w.emplace_back("asymmetric_speed_limits");
  return w;
}

std::vector<double> log_grid(double f_min, double f_max, int points) {
  require(f_min > 0.0 && f_max > f_min, "frequency_grid", "need 0 < fmin < fmax");
  require(points >= 2, "frequency_grid.points", "must be >= 2");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(f_min);
  const double b = std::log(f_max);
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  }
  out.front() = f_min;
  out.back() = f_max;
  return out;
}

std::vector<double> linear_grid(double f_min, double f_max, int points) {
  require(f_max > f_min, "frequency_grid", "need fmin < fmax");
  require(points >= 2, "frequency_grid.points", "must be >= 2");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = f_min + (f_max - f_min) * i / (points - 1);
  }
  out.back() = f_max;
  return out;
}

double angular_frequency(double f_hz) { return 2.0 * std::numbers::pi * f_hz; }

}  // namespace satfr
