#pragma once

#include <complex>

#include "satfr/model.hpp"

namespace satfr {

/// Which side of a saturation the sinusoidal input reaches.
enum class DfCase { Inactive, LowerActive, UpperActive, BothActive };

const char* to_string(DfCase c);

/// Describing function of a saturation. Real by construction: the first
/// harmonic of a clipped sinusoid is in phase with its input, and the gain
/// does not depend on frequency (there is no frequency argument).
struct DfValue {
  double value = 1.0;
  DfCase case_id = DfCase::Inactive;
};

/// Incremental-input describing function seen by a small perturbation
/// eps*sin(wt + theta) riding on B*sin(wt).
struct IdfValue {
  std::complex<double> value{1.0, 0.0};
  double theta = 0.0;
};

// All routines take the input amplitude B and the clip bounds lo < 0 < hi;
// either bound may be infinite. B <= 0 throws DomainError, bad bounds throw
// ValidationError. At B equal to a bound magnitude the active-limit formula
// is used; both sides agree there.

DfValue df_saturation(double B, double lo, double hi);

/// dN/dB. One-sided at case boundaries; zero in the inactive region.
double df_derivative(double B, double lo, double hi);

/// N(B) + (B/2) N'(B) (1 + exp(-j 2 theta)).
IdfValue idf_saturation(double B, double lo, double hi, double theta);

// Named wrappers for the two saturation elements of the loop.

inline DfValue accel_df(double B, const SaturationLimits& l) { return df_saturation(B, l.a_min, l.a_max); }
inline DfValue speed_df(double B, const SaturationLimits& l) { return df_saturation(B, l.vt_min, l.vt_max); }

inline IdfValue accel_idf(double B, const SaturationLimits& l, double theta) {
  return idf_saturation(B, l.a_min, l.a_max, theta);
}
inline IdfValue speed_idf(double B, const SaturationLimits& l, double theta) {
  return idf_saturation(B, l.vt_min, l.vt_max, theta);
}

}  // namespace satfr
