// Scalar normal-distribution primitives used throughout the library:
// density, CDF, quantile, and the upper-tail hazard ratio. All functions
// operate on the standard normal; callers rescale by mean and deviation.

#pragma once

namespace qdd {

/// Standard normal density phi(x) = exp(-x^2/2) / sqrt(2*pi).
double normal_pdf(double x);

/// Standard normal CDF Phi(x), evaluated through erfc so that both tails
/// retain full relative accuracy down to the underflow threshold.
double normal_cdf(double x);

/// Upper-tail probability 1 - Phi(x), accurate for large positive x where
/// forming the complement of normal_cdf would lose all precision.
double normal_sf(double x);

/// Inverse CDF (quantile) of the standard normal.
///
/// Uses Wichura's rational approximations (algorithm AS 241, double
/// precision branch), giving about 15 significant digits over the full
/// open interval. Throws std::domain_error unless 0 < p < 1.
double normal_quantile(double p);

/// Hazard ratio phi(z) / (1 - Phi(z)).
///
/// Evaluated directly through erfc for z <= 30 and by an asymptotic
/// Mills-ratio expansion beyond that, so the ratio stays finite and
/// accurate far past the point where the denominator alone would
/// underflow. Throws std::domain_error for z above ~38 where the
/// survival probability is no longer representable at all; callers that
/// can tolerate the limit should branch before calling.
double normal_hazard(double z);

/// Largest z for which normal_hazard is defined. Past this the survival
/// probability underflows to zero and conditional-moment recursions that
/// divide by it are meaningless.
inline constexpr double kHazardMaxZ = 38.0;

} // namespace qdd
