#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "satfr/errors.hpp"
#include "satfr/harmonic_balance.hpp"
#include "satfr/model.hpp"

namespace satfr {

/// Sampled closed-loop run in oscillatory coordinates.
struct SimTrajectory {
  double dt = 0.0;  ///< spacing of the recorded samples
  std::vector<double> t;
  std::vector<double> leader;            ///< leader position R sin(wt)
  std::vector<double> follower;          ///< follower position
  std::vector<double> velocity;          ///< raw velocity state
  std::vector<double> applied_velocity;  ///< velocity after the speed clamp
  std::vector<double> acceleration;      ///< acceleration after the clamp

  std::size_t size() const { return t.size(); }
};

struct SimOptions {
  double initial_position = 0.0;
  double initial_velocity = 0.0;
  std::size_t record_stride = 1;
  double duration = 0.0;  ///< 0 selects (settle + measure) periods
};

/// Integration step used at omega: the largest step not above the requested
/// one that fits an integer number of times into a period.
double effective_step(double omega, const SolverSettings& settings);

/// Fixed-step RK4 of the clamped loop. Throws ValidationError when
/// settings.dt exceeds min(0.01, 0.001 * 2 pi / omega), DivergenceError on
/// a non-finite state.
SimTrajectory simulate(const Scenario& scenario, double omega, const SolverSettings& settings,
                       const SimOptions& options = {});

struct HarmonicFit {
  double amplitude = 0.0;
  double phase = 0.0;              ///< relative to sin(wt)
  double residual_fraction = 0.0;  ///< AC energy outside the first harmonic
};

/// Trapezoid projection of uniformly spaced samples spanning whole periods
/// (first and last sample one or more periods apart). t0 is the time of the
/// first sample.
HarmonicFit fit_first_harmonic(std::span<const double> y, double t0, double dt, double omega);

/// Fits the follower position over the trailing window [t_end - window, t_end].
/// Throws ValidationError when window is not an integer number of periods
/// or of sample steps, or exceeds the trajectory.
HarmonicFit extract_first_harmonic(const SimTrajectory& trajectory, double omega, double window);

/// Steady state not reached within SolverSettings::max_periods.
class NonConvergence : public Error {
 public:
  NonConvergence(const HarmonicFit& previous, const HarmonicFit& last, int periods);

  const HarmonicFit& previous() const noexcept { return previous_; }
  const HarmonicFit& last() const noexcept { return last_; }
  int periods() const noexcept { return periods_; }

 private:
  HarmonicFit previous_;
  HarmonicFit last_;
  int periods_;
};

struct SimEstimate {
  FrequencyResponsePoint point;
  HarmonicFit fit;
  int periods_simulated = 0;
  bool accel_clipped = false;  ///< acceleration clamp engaged during measurement
  bool speed_clipped = false;  ///< speed clamp engaged during measurement
};

/// Tolerance of the steady-state gate on consecutive single-period fits.
inline constexpr double kSteadyStateTolerance = 1e-3;

/// Simulates from rest, waits until measure_periods consecutive pairs of
/// single-period fits agree within kSteadyStateTolerance (relative phasor
/// distance), then fits measure_periods.
SimEstimate estimate_frequency_response(const Scenario& scenario, double omega, const SolverSettings& settings);

struct DecayReport {
  bool passed = false;
  double initial_offset = 0.0;
  double horizon = 0.0;
  double final_envelope = 0.0;  ///< max |follower| over the final 10% of the horizon
  double threshold = 0.0;       ///< 1e-3 * |initial_offset|
};

/// Free response (R = 0) from a position offset.
DecayReport decay_check(const Scenario& scenario, double initial_offset, const SolverSettings& settings,
                        double horizon = 300.0);

/// Writes t,leader,follower,velocity,applied_velocity,acceleration.
void write_trajectory_csv(const SimTrajectory& trajectory, const std::string& path);

}  // namespace satfr
