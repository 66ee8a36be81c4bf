#pragma once

#include <string>
#include <utility>
#include <vector>

namespace satfr {

/// Feedback gains of the linear car-following law and the equivalent
/// gains acting on oscillatory coordinates:
///   a = k1 (p_lead - p) + k2 dp_lead/dt + k3 dp/dt
struct ControllerGains {
  double k_d = 0.0;  ///< spacing-deviation gain [1/s^2]
  double k_v = 0.0;  ///< speed-difference gain [1/s]
  double tau = 0.0;  ///< spacing-policy time gap [s]
  double k1 = 0.0;   ///< [1/s^2], > 0
  double k2 = 0.0;   ///< [1/s], > 0
  double k3 = 0.0;   ///< [1/s], < 0

  bool operator==(const ControllerGains&) const = default;
};

/// Builds ControllerGains from the raw law. Throws ValidationError on
/// k_d <= 0, k_v <= 0, tau < 0 or non-finite input.
ControllerGains derive_loop_gains(double k_d, double k_v, double tau);

/// Acceleration and speed limits. Inactive saturations carry infinite bounds
/// so the describing function of that element is identically 1.
struct SaturationLimits {
  double a_min;
  double a_max;
  double v_min;
  double v_max;
  double v_e;
  double vt_min;  ///< oscillatory speed floor, v_min - v_e
  double vt_max;  ///< oscillatory speed ceiling, v_max - v_e
  bool accel_active = false;
  bool speed_active = false;

  SaturationLimits();

  bool operator==(const SaturationLimits&) const = default;

  /// Symmetric magnitude used for ratio axes: min(-a_min, a_max).
  double accel_bound() const;
  double speed_bound() const;

  bool accel_asymmetric() const;
  bool speed_asymmetric() const;
};

std::pair<double, double> derive_oscillatory_limits(double v_min, double v_max, double v_e);

/// Acceleration-only limits.
SaturationLimits make_accel_limits(double a_min, double a_max);
/// Speed-only limits, absolute speeds plus the equilibrium speed.
SaturationLimits make_speed_limits(double v_min, double v_max, double v_e);
/// Both saturations active.
SaturationLimits make_limits(double a_min, double a_max, double v_min, double v_max, double v_e);
/// Neither saturation active.
SaturationLimits no_limits();

enum class LoopConfig { ControlOnly, StateOnly, Both, Linear };

LoopConfig classify_loop(const SaturationLimits& limits);
std::string to_string(LoopConfig loop);

struct SolverSettings {
  double b_ini_max = 0.0;  ///< 0 selects the automatic ceiling
  int sweep_points = 200;
  double root_tol = 1e-10;
  int theta_samples = 720;
  double dt = 1e-3;
  int settle_periods = 15;
  int measure_periods = 5;
  int max_periods = 2000;  ///< cap for the steady-state gate

  bool operator==(const SolverSettings&) const = default;
};

void validate(const SolverSettings& settings);

inline constexpr double kDefaultFrequencyFloorHz = 0.002;
inline constexpr double kDefaultFrequencyCeilingHz = 0.5;

struct Scenario {
  ControllerGains gains;
  SaturationLimits limits;
  double leader_amplitude = 0.0;  ///< R [m]
  std::vector<double> freq_grid_hz;
  SolverSettings solver;
  double standstill_distance = 0.0;  ///< metadata only; cancels in oscillatory coordinates
  double frequency_floor_hz = kDefaultFrequencyFloorHz;

  bool operator==(const Scenario&) const = default;

  LoopConfig loop() const { return classify_loop(limits); }
};

/// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& scenario);

/// Non-fatal remarks about a valid scenario (asymmetric limits etc.).
std::vector<std::string> scenario_warnings(const Scenario& scenario);

std::vector<double> log_grid(double f_min, double f_max, int points);
std::vector<double> linear_grid(double f_min, double f_max, int points);

double angular_frequency(double f_hz);

}  // namespace satfr
