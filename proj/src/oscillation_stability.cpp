#include "satfr/oscillation_stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "satfr/describing_functions.hpp"
#include "satfr/errors.hpp"

namespace satfr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPoleTolerance = 1e-12;
constexpr double kCriticalTolerance = 1e-9;
const std::complex<double> kCritical{-1.0, 0.0};

}  // namespace

double combined_theta_v(double theta_a, std::complex<double> n_a_inc) { return theta_a + std::arg(n_a_inc); }

std::complex<double> incremental_gain(const OscillationCandidate& c, const BalanceProblem& p, double theta) {
  const SaturationLimits& l = p.limits;
  switch (p.loop) {
    case LoopConfig::ControlOnly:
      return accel_idf(c.B, l, theta).value;
    case LoopConfig::StateOnly:
      return speed_idf(c.B, l, theta).value;
    case LoopConfig::Both: {
      const std::complex<double> na = accel_idf(c.B, l, theta).value;
      const double b_v = c.B * accel_df(c.B, l).value / c.omega;
      return na * speed_idf(b_v, l, combined_theta_v(theta, na)).value;
    }
    case LoopConfig::Linear:
      break;
  }
  return {1.0, 0.0};
}

std::complex<double> incremental_H(const OscillationCandidate& c, const BalanceProblem& p, double theta,
                                   std::optional<double> omega_eval) {
  const double w = omega_eval.value_or(c.omega);
  const std::complex<double> n = incremental_gain(c, p, theta);
  const std::complex<double> den = std::complex<double>{0.0, w} - (p.gains.k3 - p.gains.k2) * n;
  if (std::abs(den) < kPoleTolerance) throw PoleOnLocus("incremental loop has a pole on the locus");
  return n / den;
}

std::complex<double> open_loop_value(const OscillationCandidate& c, const BalanceProblem& p, double theta,
                                     std::optional<double> omega_eval) {
  const double w = omega_eval.value_or(c.omega);
  const std::complex<double> s{0.0, w};
  return (p.gains.k1 + p.gains.k2 * s) * incremental_H(c, p, theta, w) / s;
}

std::vector<LocusPoint> open_loop_locus(const OscillationCandidate& c, const BalanceProblem& p,
                                        const SolverSettings& settings, std::optional<double> omega_eval) {
  if (settings.theta_samples < 128) throw ValidationError("solver.theta_samples", "must be >= 128");
  const int n = settings.theta_samples;
  std::vector<LocusPoint> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double theta = i == n - 1 ? 0.0 : kTwoPi * i / (n - 1);
    out[static_cast<std::size_t>(i)] = {kTwoPi * i / (n - 1), open_loop_value(c, p, theta, omega_eval)};
  }
  return out;
}

double winding_number(const std::vector<std::complex<double>>& polygon, std::complex<double> point) {
  if (polygon.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const std::complex<double> a = polygon[i] - point;
    const std::complex<double> b = polygon[(i + 1) % polygon.size()] - point;
    // arg(b / a) is the signed turn from a to b, in (-pi, pi]
    total += std::arg(b * std::conj(a));
  }
  return total / kTwoPi;
}

Stability classify_stability(const OscillationCandidate& c, const BalanceProblem& p, const SolverSettings& settings,
                             const StabilityOptions& options) {
  std::vector<double> omegas{c.omega};
  if (options.full_sweep) omegas.insert(omegas.end(), options.sweep_omegas.begin(), options.sweep_omegas.end());
  try {
    for (double w : omegas) {
      const std::vector<LocusPoint> locus = open_loop_locus(c, p, settings, w);
      std::vector<std::complex<double>> poly;
      poly.reserve(locus.size());
      for (const LocusPoint& pt : locus) {
        if (std::abs(pt.value - kCritical) < kCriticalTolerance) return Stability::Indeterminate;
        poly.push_back(pt.value);
      }
      if (std::abs(winding_number(poly, kCritical)) >= 0.5) return Stability::Unstable;
    }
  } catch (const PoleOnLocus&) {
    return Stability::Indeterminate;
  }
  return Stability::Stable;
}

SelectionReport select_response(const std::vector<OscillationCandidate>& candidates) {
  if (candidates.empty()) throw ValidationError("candidates", "selection needs at least one candidate");
  SelectionReport rep;
  for (const OscillationCandidate& c : candidates) {
    if (c.stability == Stability::Stable) rep.stable.push_back(c);
    if (c.stability == Stability::Indeterminate) rep.has_indeterminate = true;
  }
  std::sort(rep.stable.begin(), rep.stable.end(),
            [](const OscillationCandidate& a, const OscillationCandidate& b) { return a.B < b.B; });
  if (rep.stable.empty()) {
    rep.no_stable_solution = true;
    return rep;
  }
  rep.selected = rep.stable.front();
  rep.ambiguous = rep.stable.size() > 1;
  return rep;
}

}  // namespace satfr
