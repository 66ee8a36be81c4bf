#pragma once

#include <complex>
#include <string>
#include <vector>

#include "satfr/model.hpp"

namespace satfr {

/// One first-harmonic balance: the follower loop driven by R sin(wt).
struct BalanceProblem {
  LoopConfig loop = LoopConfig::Linear;
  ControllerGains gains;
  SaturationLimits limits;
  double R = 0.0;
  double omega = 0.0;
};

/// Validates omega > 0 and R >= 0.
BalanceProblem make_problem(const ControllerGains& gains, const SaturationLimits& limits, double R,
                            double omega);
BalanceProblem make_problem(const Scenario& scenario, double omega);

enum class Stability { Unknown, Stable, Unstable, Indeterminate };

const char* to_string(Stability s);

/// A harmonic-balance solution. B is the amplitude at the saturation input
/// that closes the loop: acceleration command for ControlOnly, Both and
/// Linear, oscillatory speed for StateOnly. phi is its phase relative to
/// the leader.
struct OscillationCandidate {
  double omega = 0.0;
  double B = 0.0;
  double phi = 0.0;
  LoopConfig loop = LoopConfig::Linear;
  double residual = 0.0;
  Stability stability = Stability::Unknown;
};

enum class ResponseMethod { IDF, Linear, Simulation };

const char* to_string(ResponseMethod m);

struct FrequencyResponsePoint {
  double omega = 0.0;
  double magnitude = 0.0;
  double phase = 0.0;            ///< principal value in (-pi, pi]
  double phase_unwrapped = 0.0;  ///< continuous along a sweep
  ResponseMethod method = ResponseMethod::Linear;
};

/// Loop gain of the saturation chain at input amplitude B:
///   ControlOnly N_a(B), StateOnly N_v(B), Both N_a(B) N_v(B N_a(B) / w), Linear 1.
double effective_gain(double B, const BalanceProblem& problem);

/// D(N) = (1 - k1 N / w^2) + j k3 N / w
std::complex<double> balance_denominator(double N, const BalanceProblem& problem);

/// Leader forcing phasor: k1 + j w k2 at the acceleration command,
/// k2 - j k1 / w at the oscillatory speed (StateOnly).
std::complex<double> balance_forcing(const BalanceProblem& problem);

struct BalanceResidual {
  double g = 0.0;    ///< B |D| - R |U|
  double phi = 0.0;  ///< arg U - arg D, principal value
};

/// Phasor form of the amplitude/phase balance: B e^{j phi} D(N(B)) = R U.
BalanceResidual balance_residual(double B, const BalanceProblem& problem);

/// Upper end of the amplitude scan when SolverSettings::b_ini_max is 0.
double default_b_ini_max(const BalanceProblem& problem);

/// All harmonic-balance roots in (0, b_ini_max], sorted by B, stability
/// Unknown. R = 0 yields an empty list; see check_no_limit_cycle. Throws
/// NoRootFound when the scan sees no sign change.
std::vector<OscillationCandidate> solve_candidates(const BalanceProblem& problem,
                                                   const SolverSettings& settings);

/// Closed-loop response implied by a candidate. Throws UndefinedResponse for R = 0.
FrequencyResponsePoint frequency_response(const OscillationCandidate& candidate,
                                          const BalanceProblem& problem);

/// (j w k2 + k1) / (-w^2 - j w k3 + k1)
std::complex<double> linear_transfer(const ControllerGains& gains, double omega);
FrequencyResponsePoint linear_frequency_response(const ControllerGains& gains, double omega);

/// Which limits the candidate's saturation inputs reach.
struct SaturationState {
  double accel_amplitude = 0.0;  ///< B_a, or 0 when not part of the loop
  double speed_amplitude = 0.0;  ///< B_v, or 0 when not part of the loop
  bool accel_reached = false;
  bool speed_reached = false;

  bool any() const { return accel_reached || speed_reached; }
};

SaturationState saturation_state(const OscillationCandidate& candidate, const BalanceProblem& problem);

struct LimitCycleReport {
  bool no_root = true;
  double min_g_over_B = 0.0;  ///< min |D(N(B))| over the grid
  double min_abs_imag_D = 0.0;
  double b_max = 0.0;
  int grid_points = 0;
  std::vector<double> violating_B;  ///< grid points with g <= 0, empty when sound
};

/// Scans g(B) = B |D(N(B))| for R = 0; any non-positive value would be a
/// self-sustained oscillation. A violation is reported, not thrown.
LimitCycleReport check_no_limit_cycle(const BalanceProblem& problem, const SolverSettings& settings);

/// Unwraps a phase sequence by continuity, keeping the first element.
std::vector<double> unwrap_phases(const std::vector<double>& principal);

/// Maps an angle to (-pi, pi].
double principal_angle(double a);

}  // namespace satfr
