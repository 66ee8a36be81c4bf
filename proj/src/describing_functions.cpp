#include "satfr/describing_functions.hpp"

#include <cmath>
#include <numbers>

#include "satfr/errors.hpp"

namespace satfr {

namespace {

constexpr double kPi = std::numbers::pi;

void check_arguments(double B, double lo, double hi) {
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("describing function needs a finite amplitude B > 0");
  if (!(lo < 0.0)) throw ValidationError("saturation.lo", "lower bound must be < 0");
  if (!(hi > 0.0)) throw ValidationError("saturation.hi", "upper bound must be > 0");
}

// r*sqrt(1 - r^2) + asin(r), the clipped-area term for a bound at r = c/B.
double clip_term(double r) { return r * std::sqrt(1.0 - r * r) + std::asin(r); }

// d/dB clip_term(c/B) = -2 c sqrt(1 - (c/B)^2) / B^2
double clip_term_slope(double c, double B) {
  const double r = c / B;
  return -2.0 * c * std::sqrt(1.0 - r * r) / (B * B);
}

DfCase select_case(double B, double lo, double hi) {
  const bool upper = B >= hi;
  const bool lower = B >= -lo;
  if (upper && lower) return DfCase::BothActive;
  if (upper) return DfCase::UpperActive;
  if (lower) return DfCase::LowerActive;
  return DfCase::Inactive;
}

}  // namespace

const char* to_string(DfCase c) {
  switch (c) {
    case DfCase::Inactive:
      return "inactive";
    case DfCase::LowerActive:
      return "lower_active";
    case DfCase::UpperActive:
      return "upper_active";
    case DfCase::BothActive:
      return "both_active";
  }
  return "unknown";
}

DfValue df_saturation(double B, double lo, double hi) {
  check_arguments(B, lo, hi);
  const DfCase c = select_case(B, lo, hi);
  switch (c) {
    case DfCase::Inactive:
      return {1.0, c};
    case DfCase::LowerActive:
      return {0.5 - clip_term(lo / B) / kPi, c};
    case DfCase::UpperActive:
      return {0.5 + clip_term(hi / B) / kPi, c};
    case DfCase::BothActive:
      return {(clip_term(hi / B) - clip_term(lo / B)) / kPi, c};
  }
  return {1.0, DfCase::Inactive};
}

double df_derivative(double B, double lo, double hi) {
  check_arguments(B, lo, hi);
  switch (select_case(B, lo, hi)) {
    case DfCase::Inactive:
      return 0.0;
    case DfCase::LowerActive:
      return -clip_term_slope(lo, B) / kPi;
    case DfCase::UpperActive:
      return clip_term_slope(hi, B) / kPi;
    case DfCase::BothActive:
      return (clip_term_slope(hi, B) - clip_term_slope(lo, B)) / kPi;
  }
  return 0.0;
}

IdfValue idf_saturation(double B, double lo, double hi, double theta) {
  const DfValue n = df_saturation(B, lo, hi);
  if (n.case_id == DfCase::Inactive) return {{1.0, 0.0}, theta};
  const double half_slope = 0.5 * B * df_derivative(B, lo, hi);
  // 1 + exp(-j2θ) = (1 + cos 2θ) - j sin 2θ
  const double re = n.value + half_slope * (1.0 + std::cos(2.0 * theta));
  const double im = -half_slope * std::sin(2.0 * theta);
  return {{re, im}, theta};
}

}  // namespace satfr
