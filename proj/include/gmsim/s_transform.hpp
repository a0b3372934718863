#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gmsim/signal_metrics.hpp"
#include "gmsim/time_series.hpp"

namespace gmsim {

/// Amplitude |S(tau, f)| of the S-transform: a Gaussian window of standard
/// deviation 1/f translated across the trace. Times are absolute (including
/// the trace t0); the zero-frequency row is never part of the map.
struct TimeFrequencyMap {
  std::vector<double> times;  // s
  std::vector<double> freqs;  // Hz, uniform spacing
  std::vector<double> amp;    // row-major [time][freq]

  std::size_t nt() const { return times.size(); }
  std::size_t nf() const { return freqs.size(); }
  double at(std::size_t it, std::size_t ifr) const {
    return amp[it * freqs.size() + ifr];
  }
  /// Time of the global amplitude maximum.
  double peak_time() const;
};

/// Uniform frequency grid on the DFT bins of the zero-padded analysis
/// window: f = k*df with df = 1/(n_fft*dt), thinned by `stride_f`, capped at
/// f_max (and the Nyquist frequency). Zero frequency is excluded.
std::vector<double> stransform_freq_grid(const TimeSeries& ts, double f_max,
                                         std::size_t stride_f = 1);

/// Spectral-multiplication evaluation: one inverse FFT per frequency row.
/// Frequencies must lie on the DFT bin grid of the padded window.
TimeFrequencyMap s_transform(const TimeSeries& ts,
                             std::span<const double> freqs,
                             std::size_t stride_t = 1);

/// Direct windowed-sum reference with the same periodic extension as the
/// fast path; O(nt * nf * n). The two must agree to 1e-10 of the map
/// maximum.
TimeFrequencyMap s_transform_direct(const TimeSeries& ts,
                                    std::span<const double> freqs,
                                    std::size_t stride_t = 1);

struct CentralFrequencySeries {
  std::vector<double> taus;  // s, relative to the P arrival
  std::vector<double> fc;    // Hz
  double t_p = 0.0;          // absolute P-arrival time
  double f_lo = 0.0;         // admitted band, Hz
  double f_hi = 0.0;
};

/// Root-mean-square frequency sqrt(m2/m0) of |S|^2 per time slice, with the
/// spectral moments restricted to frequencies whose SNR exceeds 3, between
/// the P arrival and t95. Throws if no frequency passes the SNR gate.
CentralFrequencySeries central_frequency_series(const TimeFrequencyMap& map,
                                                const SnrProfile& snr,
                                                double t_p, double t95);

enum class FcBranch { full, s_wave, p_wave };

struct FcFit {
  double a = 0.0;  // intercept of ln Fc against ln(tau+1)
  double b = 0.0;  // positive slope means frequency decays with time
  FcBranch branch = FcBranch::full;
  double tau_start = 0.0;
  double tau_end = 0.0;
  double rms_residual = 0.0;
};

/// ln Fc = A - B ln(tau+1) by least squares over the whole series. When the
/// whole-window B is not positive, the series is refit on the two windows
/// split at the map's amplitude peak; the late (S-wave) fit wins unless its
/// B is negative while the early (P-wave) fit has B > 0. Throws when no
/// window gives a usable slope.
FcFit fit_fc_model(const CentralFrequencySeries& series,
                   const TimeFrequencyMap& map);

/// Model evaluation exp(A - B ln(tau+1)).
double fc_model(const FcFit& fit, double tau);

const char* to_string(FcBranch b);

struct PickerOptions {
  double short_window = 0.5;  // s
  double long_window = 5.0;   // s
  double threshold = 3.0;
  double min_history = 1.0;   // s of data required before a trigger
};

/// Short-term/long-term energy-ratio trigger. Throws when nothing triggers
/// (callers may supply the arrival explicitly instead).
double pick_p_arrival(const TimeSeries& ts, const PickerOptions& opts = {});

/// CSV dump (tau, f, amplitude) for plotting.
void write_map_csv(const TimeFrequencyMap& map, const std::string& path);

}  // namespace gmsim
