#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "satfr/harmonic_balance.hpp"

namespace satfr {

struct LocusPoint {
  double theta = 0.0;
  std::complex<double> value;
};

/// Perturbation phase offset at the speed saturation of the combined loop.
/// The integrator between the two elements delays the predominant and the
/// perturbation alike, so only the acceleration IDF phase carries over.
double combined_theta_v(double theta_a, std::complex<double> n_a_inc);

/// Incremental gain of the saturation chain for perturbation offset theta
/// (theta_a for ControlOnly and Both, theta_v for StateOnly).
std::complex<double> incremental_gain(const OscillationCandidate& candidate, const BalanceProblem& problem,
                                      double theta);

/// H(j omega_eval) = N_inc / (j omega_eval - (k3 - k2) N_inc). omega_eval
/// defaults to the candidate frequency. Throws PoleOnLocus when the
/// denominator magnitude is below 1e-12.
std::complex<double> incremental_H(const OscillationCandidate& candidate, const BalanceProblem& problem,
                                   double theta, std::optional<double> omega_eval = std::nullopt);

/// T_o = (k1 + k2 s) H(s) / s at s = j omega_eval.
std::complex<double> open_loop_value(const OscillationCandidate& candidate, const BalanceProblem& problem,
                                     double theta, std::optional<double> omega_eval = std::nullopt);

/// theta_samples points with theta = 2 pi i / (n - 1): the last point
/// repeats the first, so the sequence is closed.
std::vector<LocusPoint> open_loop_locus(const OscillationCandidate& candidate, const BalanceProblem& problem,
                                        const SolverSettings& settings,
                                        std::optional<double> omega_eval = std::nullopt);

/// Winding number of the closed polygon (last vertex joins the first)
/// around point, from summed principal angle increments.
double winding_number(const std::vector<std::complex<double>>& polygon, std::complex<double> point);

struct StabilityOptions {
  bool full_sweep = false;
  std::vector<double> sweep_omegas;  ///< used when full_sweep is set
};

/// Stable when the locus does not wind around -1; Indeterminate on a pole
/// or when the locus passes within 1e-9 of -1.
Stability classify_stability(const OscillationCandidate& candidate, const BalanceProblem& problem,
                             const SolverSettings& settings, const StabilityOptions& options = {});

struct SelectionReport {
  std::optional<OscillationCandidate> selected;
  bool ambiguous = false;
  bool no_stable_solution = false;
  bool has_indeterminate = false;
  std::vector<OscillationCandidate> stable;  ///< all stable candidates, ascending B
};

/// Drops unstable candidates and picks the smallest-B stable one. Throws
/// ValidationError on an empty list.
SelectionReport select_response(const std::vector<OscillationCandidate>& candidates);

}  // namespace satfr
