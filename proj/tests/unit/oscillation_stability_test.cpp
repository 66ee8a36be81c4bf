#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "satfr/describing_functions.hpp"
#include "satfr/errors.hpp"
#include "satfr/oscillation_stability.hpp"

using namespace satfr;

namespace {

constexpr double kPi = std::numbers::pi;
const ControllerGains kCar = derive_loop_gains(1, 2, 1);

std::vector<std::complex<double>> circle(std::complex<double> c, double r, int n) {
  std::vector<std::complex<double>> pts;
  for (int i = 0; i < n; ++i) pts.push_back(c + std::polar(r, 2 * kPi * i / n));
  return pts;
}

std::vector<std::complex<double>> values(const std::vector<LocusPoint>& locus) {
  std::vector<std::complex<double>> v;
  for (const LocusPoint& p : locus) v.push_back(p.value);
  return v;
}

OscillationCandidate first_candidate(const BalanceProblem& p) { return solve_candidates(p, {}).front(); }

}  // namespace

TEST(Winding, RandomCirclesAgainstPointInCircle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3, 3), rad(0.05, 3);
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::complex<double> c{u(rng), u(rng)};
    const double r = rad(rng);
    const std::complex<double> q{u(rng), u(rng)};
    if (std::abs(std::abs(q - c) - r) < 1e-3 * r) continue;
    const auto poly = circle(c, r, 720);
    const double w = winding_number(poly, q);
    const bool in = std::abs(q - c) < r * std::cos(kPi / 720);
    if (std::abs(std::abs(q - c) - r) < r * (1 - std::cos(kPi / 720))) continue;  // chord band
    EXPECT_EQ(std::lround(w), in ? 1 : 0) << w;
    EXPECT_NEAR(w, std::round(w), 1e-9);
    inside += in;
  }
  EXPECT_GT(inside, 50);
}

TEST(Winding, OrientationAndDoubleLoops) {
  auto poly = circle({-1, 0}, 1.0, 360);
  EXPECT_NEAR(winding_number(poly, {-1, 0}), 1.0, 1e-12);
  std::reverse(poly.begin(), poly.end());
  EXPECT_NEAR(winding_number(poly, {-1, 0}), -1.0, 1e-12);
  EXPECT_NEAR(winding_number(circle({1, 0}, 1.0, 360), {-1, 0}), 0.0, 1e-12);
  std::vector<std::complex<double>> twice;
  for (int i = 0; i < 720; ++i) twice.push_back(std::polar(1.0, 4 * kPi * i / 720));
  EXPECT_NEAR(winding_number(twice, {0, 0}), 2.0, 1e-12);
  EXPECT_EQ(winding_number({{1, 0}}, {0, 0}), 0.0);
}

TEST(Locus, InactiveCandidateCollapsesToPoint) {
  const double w = angular_frequency(0.1);
  const BalanceProblem p = make_problem(kCar, make_accel_limits(-5, 5), 0.5, w);
  const OscillationCandidate c = first_candidate(p);
  const auto locus = open_loop_locus(c, p, {});
  ASSERT_EQ(locus.size(), 720u);
  const std::complex<double> s{0, w};
  const std::complex<double> expect = (1.0 + 2.0 * s) / (s * (5.0 + s));
  for (const LocusPoint& pt : locus) EXPECT_NEAR(std::abs(pt.value - expect), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(expect), 0.507, 1e-3);
  EXPECT_NEAR(winding_number(values(locus), {-1, 0}), 0.0, 1e-12);
  EXPECT_EQ(classify_stability(c, p, {}), Stability::Stable);
}

TEST(Locus, ClosedSequence) {
  const BalanceProblem p = make_problem(kCar, make_accel_limits(-5, 5), 20, angular_frequency(0.1));
  const auto locus = open_loop_locus(first_candidate(p), p, {});
  EXPECT_EQ(locus.front().theta, 0.0);
  EXPECT_NEAR(locus.back().theta, 2 * kPi, 1e-12);
  EXPECT_EQ(locus.front().value, locus.back().value);
}

TEST(Locus, SingleSaturationLocusIsACircle) {
  // theta -> N_inc traces a circle and the loop map is Moebius in N_inc.
  int saturated = 0;
  for (double f : {0.05, 0.1, 0.2, 0.3}) {
    for (bool state : {false, true}) {
      const SaturationLimits l = state ? make_speed_limits(0, 20, 10) : make_accel_limits(-5, 5);
      const BalanceProblem p = make_problem(kCar, l, state ? 40 : 20, angular_frequency(f));
      const OscillationCandidate c = first_candidate(p);
      if (!saturation_state(c, p).any()) continue;
      ++saturated;
      const oracle::Circle fit = oracle::fit_circle(values(open_loop_locus(c, p, {})));
      EXPECT_LT(fit.max_residual, 1e-8) << f << " " << state;
      EXPECT_GT(fit.radius, 1e-6);
    }
  }
  EXPECT_GE(saturated, 5);
}

TEST(Locus, SampleCountDoesNotChangeVerdict) {
  SolverSettings coarse, fine;
  coarse.theta_samples = 128;
  fine.theta_samples = 4096;
  for (double f : linear_grid(0.02, 0.5, 10)) {
    for (double R : {5.0, 20.0, 40.0}) {
      const BalanceProblem p = make_problem(kCar, make_limits(-5, 5, 0, 20, 10), R, angular_frequency(f));
      for (const OscillationCandidate& c : solve_candidates(p, {})) {
        EXPECT_EQ(classify_stability(c, p, coarse), classify_stability(c, p, fine));
        const double w1 = winding_number(values(open_loop_locus(c, p, coarse)), {-1, 0});
        const double w2 = winding_number(values(open_loop_locus(c, p, fine)), {-1, 0});
        EXPECT_NEAR(w1, w2, 1e-9);
      }
    }
  }
}

TEST(Locus, CombinedLoopWithLinearSpeedMatchesControlOnly) {
  const double w = angular_frequency(0.3);
  const BalanceProblem both = make_problem(kCar, make_limits(-5, 5, 0, 20, 10), 20, w);
  const BalanceProblem ctrl = make_problem(kCar, make_accel_limits(-5, 5), 20, w);
  const OscillationCandidate cb = first_candidate(both);
  const OscillationCandidate cc = first_candidate(ctrl);
  const SaturationState st = saturation_state(cb, both);
  ASSERT_TRUE(st.accel_reached);
  ASSERT_FALSE(st.speed_reached);
  EXPECT_NEAR(cb.B, cc.B, 1e-9 * cc.B);
  for (double th : {0.0, 0.5, 1.7, 3.0}) {
    EXPECT_NEAR(std::abs(open_loop_value(cb, both, th) - open_loop_value(cc, ctrl, th)), 0.0, 1e-12);
  }
}

TEST(CombinedTheta, MatchesChainedPerturbation) {
  // Perturb clip -> integrator -> clip directly and compare the measured
  // incremental gain with the chained prediction.
  const double w = 0.6283, Ba = 10, a = 5, vb = 6, eps = 1e-5;
  const int M = 100000;
  const double T = 2 * kPi / w, h = T / M;
  auto chain = [&](double th, double e) {
    std::vector<double> y(M), v(M);
    for (int i = 0; i < M; ++i) {
      const double t = i * h;
      y[i] = oracle::clip(Ba * std::sin(w * t) + e * std::sin(w * t + th), -a, a);
    }
    // periodic antiderivative: trapezoid cumulative sum with the mean removed
    double acc = 0, mean_y = 0;
    for (double x : y) mean_y += x / M;
    for (int i = 0; i < M; ++i) {
      v[i] = acc;
      acc += 0.5 * h * ((y[i] - mean_y) + (y[(i + 1) % M] - mean_y));
    }
    double mean_v = 0;
    for (double x : v) mean_v += x / M;
    for (double& x : v) x = oracle::clip(x - mean_v, -vb, vb);
    return v;
  };
  auto phasor = [&](const std::vector<double>& z) {
    std::complex<double> acc{0, 0};
    for (int i = 0; i < M; ++i) acc += z[i] * std::exp(std::complex<double>(0, -w * i * h));
    return 2.0 * acc / double(M);
  };
  const std::vector<double> ref = chain(0.0, 0.0);
  // theta = 0 is left out: there the perturbation reaches the speed clip
  // only while it is saturated, so the measured gain vanishes and no
  // first-harmonic chain can reproduce it.
  for (double th : {0.4, 0.7, 1.5, 2.2, 2.8}) {
    const std::vector<double> z = chain(th, eps);
    std::vector<double> d(M);
    for (int i = 0; i < M; ++i) d[i] = (z[i] - ref[i]) / eps;
    std::vector<double> in(M);
    for (int i = 0; i < M; ++i) in[i] = std::sin(w * i * h + th);
    const std::complex<double> measured = phasor(d) / phasor(in);
    const std::complex<double> na = idf_saturation(Ba, -a, a, th).value;
    const double bv = Ba * df_saturation(Ba, -a, a).value / w;
    const std::complex<double> jw{0, w};
    const std::complex<double> pred = na * idf_saturation(bv, -vb, vb, combined_theta_v(th, na)).value / jw;
    const std::complex<double> shifted = na * idf_saturation(bv, -vb, vb, combined_theta_v(th, na) - kPi / 2).value / jw;
    EXPECT_LT(std::abs(measured - pred), 0.15 * std::abs(measured)) << th << " " << measured << " " << pred;
    EXPECT_LT(std::abs(measured - pred), std::abs(measured - shifted)) << th;
  }
}

TEST(Classify, ScenarioCandidatesAreStable) {
  const SaturationLimits l = make_limits(-5, 5, 0, 20, 10);
  StabilityOptions full;
  full.full_sweep = true;
  for (double f : linear_grid(0.02, 0.5, 12)) full.sweep_omegas.push_back(angular_frequency(f));
  for (double f : linear_grid(0.02, 0.5, 12)) {
    const BalanceProblem p = make_problem(kCar, l, 20, angular_frequency(f));
    for (OscillationCandidate c : solve_candidates(p, {})) {
      const Stability s = classify_stability(c, p, {});
      EXPECT_NE(s, Stability::Unknown);
      if (s == Stability::Stable) EXPECT_NE(classify_stability(c, p, {}, full), Stability::Unknown);
    }
  }
}

TEST(Select, Rules) {
  auto cand = [](double B, Stability s) {
    OscillationCandidate c;
    c.B = B;
    c.stability = s;
    return c;
  };
  EXPECT_THROW(select_response({}), ValidationError);
  SelectionReport r = select_response({cand(3, Stability::Stable), cand(1, Stability::Unstable), cand(2, Stability::Stable)});
  ASSERT_TRUE(r.selected);
  EXPECT_EQ(r.selected->B, 2.0);
  EXPECT_TRUE(r.ambiguous);
  EXPECT_EQ(r.stable.size(), 2u);
  r = select_response({cand(1, Stability::Unstable), cand(2, Stability::Indeterminate)});
  EXPECT_FALSE(r.selected);
  EXPECT_TRUE(r.no_stable_solution);
  EXPECT_TRUE(r.has_indeterminate);
  r = select_response({cand(5, Stability::Stable)});
  EXPECT_FALSE(r.ambiguous);
  EXPECT_EQ(r.selected->B, 5.0);
}
