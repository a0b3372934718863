#pragma once

#include <span>
#include <vector>

#include "gmsim/time_series.hpp"

namespace gmsim {

struct AriasResult {
  double ai = 0.0;                 // m/s
  std::vector<double> cumulative;  // running integral, ends at ai
};

struct SignificantDuration {
  double t5 = 0.0;
  double t95 = 0.0;
  double dsr = 0.0;
};

struct ScalarMetrics {
  double pga = 0.0;    // m/s^2
  double pga_g = 0.0;  // g
  double ai = 0.0;     // m/s
  double t5 = 0.0;     // s
  double t95 = 0.0;    // s
  double dsr = 0.0;    // s
};

struct ResponseSpectrum {
  std::vector<double> periods;  // s, strictly increasing; 0 encodes PGA
  std::vector<double> sa_g;     // peak absolute oscillator acceleration, g
  double damping = 0.05;
};

struct SnrProfile {
  std::vector<double> freqs;  // Hz
  std::vector<double> snr;    // dimensionless amplitude ratio
  double noise_start = 0.0;   // s
  double noise_end = 0.0;     // s (noise window is 1 s long)

  /// Profile that admits every frequency (used for noise-free synthetics).
  static SnrProfile all_pass(std::vector<double> freqs);
};

double compute_pga(const TimeSeries& ts);

/// Arias intensity pi/(2g) * integral of a^2 dt, trapezoid rule. The
/// cumulative series is the running trapezoid integral (monotone, ends at
/// ai).
AriasResult compute_arias(const TimeSeries& ts);

/// Times where the normalized cumulative signal energy first crosses 5% and
/// 95%, interpolated linearly between samples. Each sample's squared
/// amplitude is treated as arriving within one sample interval, so an
/// isolated spike has dsr < dt. Throws on a zero-energy trace.
SignificantDuration compute_significant_duration(const TimeSeries& ts);

ScalarMetrics compute_scalar_metrics(const TimeSeries& ts);

/// Peak absolute acceleration of a damped single-degree-of-freedom
/// oscillator under base excitation, by implicit average-acceleration
/// stepping. The step is subdivided so it never exceeds period/10, and the
/// input is extended by one free-vibration period so late peaks are not cut
/// off. period <= 0 returns the PGA.
double sdof_peak_abs_accel(const TimeSeries& ts, double period, double damping);

ResponseSpectrum compute_response_spectrum(const TimeSeries& ts,
                                           std::span<const double> periods,
                                           double damping = 0.05);

/// Smoothed Fourier-amplitude ratio of the post-arrival window to the 1-s
/// pre-event noise window, normalized by window duration. Spectra are
/// smoothed over a 0.1-decade log-frequency window before the ratio.
/// Requires at least 1 s of samples before p_arrival.
SnrProfile compute_snr(const TimeSeries& ts, double p_arrival);

/// SNR interpolated at an arbitrary frequency (clamped at the grid edges).
double snr_at(const SnrProfile& profile, double freq);

}  // namespace gmsim
