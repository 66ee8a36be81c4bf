#include "satfr/harmonic_balance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "satfr/describing_functions.hpp"
#include "satfr/errors.hpp"

namespace satfr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFirstHarmonicBound = 4.0 / kPi;

std::string no_root_message(double g_first, double g_last, double b_max) {
  std::ostringstream os;
  os << "no sign change of g(B) on (0, " << b_max << "]: g(first)=" << g_first << ", g(last)=" << g_last;
  return os.str();
}

double largest_magnitude(double lo, double hi) { return std::max(-lo, hi); }

// Upper bound on the first-harmonic amplitude of B*N(B) over all B. Any
// balance root satisfies B <= R|U| + k1 * bound / w^2 because
// |D| >= Re D = 1 - k1 N / w^2.
double saturated_output_bound(const BalanceProblem& p) {
  const SaturationLimits& l = p.limits;
  const double accel = kFirstHarmonicBound * largest_magnitude(l.a_min, l.a_max);
  const double speed = kFirstHarmonicBound * largest_magnitude(l.vt_min, l.vt_max);
  switch (p.loop) {
    case LoopConfig::ControlOnly:
      return accel;
    case LoopConfig::StateOnly:
      return speed;
    case LoopConfig::Both:
      return std::min(accel, p.omega * speed);
    case LoopConfig::Linear:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

OscillationCandidate make_candidate(double B, const BalanceProblem& p) {
  const BalanceResidual r = balance_residual(B, p);
  OscillationCandidate c;
  c.omega = p.omega;
  c.B = B;
  c.phi = r.phi;
  c.loop = p.loop;
  c.residual = std::abs(r.g);
  c.stability = Stability::Unknown;
  return c;
}

std::vector<double> scan_grid(double b_max, int points) {
  // Uniform grid per the scan contract, merged with a geometric grid so a
  // small unsaturated root is still isolated when b_max is large.
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * points));
  for (int i = 1; i <= points; ++i) grid.push_back(b_max * i / points);
  const double lo = b_max * 1e-9;
  const double ratio = std::pow(b_max / lo, 1.0 / (points - 1));
  double b = lo;
  for (int i = 0; i < points - 1; ++i, b *= ratio) grid.push_back(b);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

NoRootFound::NoRootFound(double g_first, double g_last, double b_max)
    : Error(no_root_message(g_first, g_last, b_max)), g_first_(g_first), g_last_(g_last) {}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Unknown:
      return "unknown";
    case Stability::Stable:
      return "stable";
    case Stability::Unstable:
      return "unstable";
    case Stability::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

const char* to_string(ResponseMethod m) {
  switch (m) {
    case ResponseMethod::IDF:
      return "idf";
    case ResponseMethod::Linear:
      return "linear";
    case ResponseMethod::Simulation:
      return "simulation";
  }
  return "unknown";
}

double principal_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

BalanceProblem make_problem(const ControllerGains& gains, const SaturationLimits& limits, double R,
                            double omega) {
  if (!(std::isfinite(omega) && omega > 0.0)) throw ValidationError("omega", "must be finite and > 0");
  if (!(std::isfinite(R) && R >= 0.0)) throw ValidationError("leader_amplitude", "must be finite and >= 0");
  BalanceProblem p;
  p.loop = classify_loop(limits);
  p.gains = gains;
  p.limits = limits;
  p.R = R;
  p.omega = omega;
  return p;
}

BalanceProblem make_problem(const Scenario& scenario, double omega) {
  return make_problem(scenario.gains, scenario.limits, scenario.leader_amplitude, omega);
}

double effective_gain(double B, const BalanceProblem& p) {
  switch (p.loop) {
    case LoopConfig::ControlOnly:
      return accel_df(B, p.limits).value;
    case LoopConfig::StateOnly:
      return speed_df(B, p.limits).value;
    case LoopConfig::Both: {
      const double na = accel_df(B, p.limits).value;
      return na * speed_df(B * na / p.omega, p.limits).value;
    }
    case LoopConfig::Linear:
      if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("effective gain needs a finite amplitude B > 0");
      return 1.0;
  }
  return 1.0;
}

std::complex<double> balance_denominator(double N, const BalanceProblem& p) {
  const double w = p.omega;
  return {1.0 - p.gains.k1 * N / (w * w), p.gains.k3 * N / w};
}

std::complex<double> balance_forcing(const BalanceProblem& p) {
  const double w = p.omega;
  if (p.loop == LoopConfig::StateOnly) return {p.gains.k2, -p.gains.k1 / w};
  return {p.gains.k1, w * p.gains.k2};
}

BalanceResidual balance_residual(double B, const BalanceProblem& p) {
  const double N = effective_gain(B, p);
  const std::complex<double> D = balance_denominator(N, p);
  const std::complex<double> U = balance_forcing(p);
  return {B * std::abs(D) - p.R * std::abs(U), principal_angle(std::arg(U) - std::arg(D))};
}

double default_b_ini_max(const BalanceProblem& p) {
  const double w = p.omega;
  const ControllerGains& k = p.gains;
  const double U = std::abs(balance_forcing(p));
  const double D_lin = std::abs(balance_denominator(1.0, p));
  double bound = 0.0;
  if (p.limits.accel_active) bound = std::max(bound, largest_magnitude(p.limits.a_min, p.limits.a_max));
  const double floor = 10.0 * std::max(bound, k.k1 * p.R + k.k2 * w * p.R);
  double b = std::max(5.0 * p.R * U / D_lin, floor);
  const double y = saturated_output_bound(p);
  if (std::isfinite(y)) b = std::max(b, 1.05 * (p.R * U + k.k1 * y / (w * w)));
  return b;
}

std::vector<OscillationCandidate> solve_candidates(const BalanceProblem& p, const SolverSettings& s) {
  if (s.sweep_points < 50) throw ValidationError("solver.sweep_points", "must be >= 50");
  if (!(s.root_tol > 0.0)) throw ValidationError("solver.root_tol", "must be > 0");
  if (p.R == 0.0) return {};

  if (p.loop == LoopConfig::Linear) {
    const double B = p.R * std::abs(balance_forcing(p)) / std::abs(balance_denominator(1.0, p));
    return {make_candidate(B, p)};
  }

  const double b_max = s.b_ini_max > 0.0 ? s.b_ini_max : default_b_ini_max(p);
  const std::vector<double> grid = scan_grid(b_max, s.sweep_points);
  auto g = [&p](double B) { return balance_residual(B, p).g; };

  std::vector<double> gv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gv[i] = g(grid[i]);

  const double x_tol = 1e-3 * s.root_tol;
  auto converged = [x_tol](double a, double b) { return std::abs(b - a) <= x_tol * std::max(std::abs(a), std::abs(b)); };

  std::vector<double> roots;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (gv[i] == 0.0) {
      roots.push_back(grid[i]);
      continue;
    }
    if (i + 1 == grid.size() || gv[i + 1] == 0.0 || (gv[i] < 0.0) == (gv[i + 1] < 0.0)) continue;
    std::uintmax_t iters = 200;
    const auto [a, b] =
        boost::math::tools::toms748_solve(g, grid[i], grid[i + 1], gv[i], gv[i + 1], converged, iters);
    roots.push_back(std::abs(g(a)) <= std::abs(g(b)) ? a : b);
  }

  if (roots.empty()) throw NoRootFound(gv.front(), gv.back(), b_max);

  std::sort(roots.begin(), roots.end());
  std::vector<OscillationCandidate> out;
  const double dedup = 1e-6 * b_max;
  for (double r : roots) {
    if (!out.empty() && r - out.back().B < dedup) continue;
    out.push_back(make_candidate(r, p));
  }
  return out;
}

FrequencyResponsePoint frequency_response(const OscillationCandidate& c, const BalanceProblem& p) {
  if (!(p.R > 0.0)) throw UndefinedResponse("frequency response is undefined for R = 0");
  const double w = c.omega;
  FrequencyResponsePoint pt;
  pt.omega = w;
  pt.method = ResponseMethod::IDF;
  switch (p.loop) {
    case LoopConfig::ControlOnly:
    case LoopConfig::Both:
    case LoopConfig::Linear:
      pt.magnitude = c.B * effective_gain(c.B, p) / (w * w * p.R);
      pt.phase = principal_angle(c.phi - kPi);
      break;
    case LoopConfig::StateOnly:
      pt.magnitude = c.B * effective_gain(c.B, p) / (w * p.R);
      pt.phase = principal_angle(c.phi - kPi / 2.0);
      break;
  }
  pt.phase_unwrapped = pt.phase;
  return pt;
}

std::complex<double> linear_transfer(const ControllerGains& k, double omega) {
  const std::complex<double> jw{0.0, omega};
  return (jw * k.k2 + k.k1) / (-omega * omega - jw * k.k3 + k.k1);
}

FrequencyResponsePoint linear_frequency_response(const ControllerGains& k, double omega) {
  if (!(std::isfinite(omega) && omega > 0.0)) throw ValidationError("omega", "must be finite and > 0");
  const std::complex<double> F = linear_transfer(k, omega);
  FrequencyResponsePoint pt;
  pt.omega = omega;
  pt.magnitude = std::abs(F);
  pt.phase = principal_angle(std::arg(F));
  pt.phase_unwrapped = pt.phase;
  pt.method = ResponseMethod::Linear;
  return pt;
}

SaturationState saturation_state(const OscillationCandidate& c, const BalanceProblem& p) {
  SaturationState s;
  const SaturationLimits& l = p.limits;
  switch (p.loop) {
    case LoopConfig::ControlOnly:
      s.accel_amplitude = c.B;
      break;
    case LoopConfig::StateOnly:
      s.speed_amplitude = c.B;
      break;
    case LoopConfig::Both:
      s.accel_amplitude = c.B;
      s.speed_amplitude = c.B * accel_df(c.B, l).value / c.omega;
      break;
    case LoopConfig::Linear:
      s.accel_amplitude = c.B;
      break;
  }
  if (l.accel_active) s.accel_reached = s.accel_amplitude > std::min(-l.a_min, l.a_max);
  if (l.speed_active) s.speed_reached = s.speed_amplitude > std::min(-l.vt_min, l.vt_max);
  return s;
}

LimitCycleReport check_no_limit_cycle(const BalanceProblem& p, const SolverSettings& s) {
  if (p.R != 0.0) throw ValidationError("leader_amplitude", "limit-cycle check requires R = 0");
  double scale = 1.0;
  if (p.limits.accel_active) scale = std::max(scale, largest_magnitude(p.limits.a_min, p.limits.a_max));
  if (p.limits.speed_active) scale = std::max(scale, largest_magnitude(p.limits.vt_min, p.limits.vt_max));
  LimitCycleReport rep;
  rep.b_max = s.b_ini_max > 0.0 ? s.b_ini_max : std::max(100.0, 20.0 * scale);
  const std::vector<double> grid = scan_grid(rep.b_max, s.sweep_points);
  rep.grid_points = static_cast<int>(grid.size());
  rep.min_g_over_B = std::numeric_limits<double>::infinity();
  rep.min_abs_imag_D = std::numeric_limits<double>::infinity();
  for (double B : grid) {
    const std::complex<double> D = balance_denominator(effective_gain(B, p), p);
    const double g = B * std::abs(D);
    rep.min_g_over_B = std::min(rep.min_g_over_B, std::abs(D));
    rep.min_abs_imag_D = std::min(rep.min_abs_imag_D, std::abs(D.imag()));
    if (!(g > 0.0)) rep.violating_B.push_back(B);
  }
  rep.no_root = rep.violating_B.empty();
  return rep;
}

std::vector<double> unwrap_phases(const std::vector<double>& principal) {
  std::vector<double> out(principal.size());
  if (principal.empty()) return out;
  out[0] = principal[0];
  for (std::size_t i = 1; i < principal.size(); ++i) {
    out[i] = out[i - 1] + principal_angle(principal[i] - principal[i - 1]);
  }
  return out;
}

}  // namespace satfr
