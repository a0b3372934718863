#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gmsim {

double trapezoid(std::span<const double> y, double dx);

/// Running trapezoid integral; result[i] = integral up to sample i,
/// result[0] = 0.
std::vector<double> trapezoid_cumulative(std::span<const double> y, double dx);

/// First time the running sum of per-sample masses reaches `fraction` of the
/// total. The i-th mass is treated as arriving over (t_{i-1}, t_i] and the
/// crossing is interpolated linearly inside that interval. Total must be
/// positive.
double mass_crossing_time(std::span<const double> mass, double t0, double dt,
                          double fraction);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares of y against x. Needs at least two points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF (Acklam's rational approximation with one
/// Halley refinement; accurate to ~1e-15 for p in (0,1)).
double normal_icdf(double p);

/// Linear interpolation on a sorted grid, clamping outside the support.
double interp_clamped(std::span<const double> x, std::span<const double> y,
                      double xq);

}  // namespace gmsim
