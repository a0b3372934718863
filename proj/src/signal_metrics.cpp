#include "gmsim/signal_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gmsim/fft.hpp"
#include "gmsim/numerics.hpp"

namespace gmsim {

double compute_pga(const TimeSeries& ts) {
  validate(ts);
  double peak = 0.0;
  for (double a : ts.samples) peak = std::max(peak, std::abs(a));
  return peak;
}

AriasResult compute_arias(const TimeSeries& ts) {
  validate(ts);
  const double scale = M_PI / (2.0 * kGravity);
  AriasResult out;
  out.cumulative.resize(ts.size(), 0.0);
  double cum = 0.0;
  double prev = ts.samples[0] * ts.samples[0];
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double cur = ts.samples[i] * ts.samples[i];
    cum += 0.5 * (prev + cur) * ts.dt;
    out.cumulative[i] = scale * cum;
    prev = cur;
  }
  out.ai = out.cumulative.back();
  return out;
}

SignificantDuration compute_significant_duration(const TimeSeries& ts) {
  validate(ts);
  std::vector<double> energy(ts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    energy[i] = ts.samples[i] * ts.samples[i];
    total += energy[i];
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument(
        "compute_significant_duration: zero-energy trace");
  }
  SignificantDuration d;
  d.t5 = mass_crossing_time(energy, ts.t0, ts.dt, 0.05);
  d.t95 = mass_crossing_time(energy, ts.t0, ts.dt, 0.95);
  d.dsr = d.t95 - d.t5;
  return d;
}

ScalarMetrics compute_scalar_metrics(const TimeSeries& ts) {
  ScalarMetrics m;
  m.pga = compute_pga(ts);
  m.pga_g = m.pga / kGravity;
  m.ai = compute_arias(ts).ai;
  const SignificantDuration d = compute_significant_duration(ts);
  m.t5 = d.t5;
  m.t95 = d.t95;
  m.dsr = d.dsr;
  return m;
}

double sdof_peak_abs_accel(const TimeSeries& ts, double period, double damping) {
  validate(ts);
  if (period <= 0.0) return compute_pga(ts);

  const double omega = 2.0 * M_PI / period;
  const int sub = std::max(1, static_cast<int>(std::ceil(ts.dt / (period / 10.0))));
  const double h = ts.dt / static_cast<double>(sub);

  // Zero-pad by one period of free vibration.
  const std::size_t n_pad = static_cast<std::size_t>(std::ceil(period / ts.dt)) + 1;
  const std::size_t n = ts.size() + n_pad;

  const double two_zw = 2.0 * damping * omega;
  const double w2 = omega * omega;
  const double denom = 1.0 + two_zw * 0.5 * h + w2 * 0.25 * h * h;

  double u = 0.0, v = 0.0;
  double ag = ts.samples[0];
  double acc = -ag - two_zw * v - w2 * u;
  double peak = 0.0;  // |acc + ag| starts at zero from rest

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ag0 = (i < ts.size()) ? ts.samples[i] : 0.0;
    const double ag1 = (i + 1 < ts.size()) ? ts.samples[i + 1] : 0.0;
    for (int j = 1; j <= sub; ++j) {
      const double f = static_cast<double>(j) / static_cast<double>(sub);
      const double ag_next = ag0 + (ag1 - ag0) * f;
      const double rhs = -ag_next - two_zw * (v + 0.5 * h * acc) -
                         w2 * (u + h * v + 0.25 * h * h * acc);
      const double acc_next = rhs / denom;
      u += h * v + 0.25 * h * h * (acc + acc_next);
      v += 0.5 * h * (acc + acc_next);
      acc = acc_next;
      ag = ag_next;
      peak = std::max(peak, std::abs(acc + ag));
    }
  }
  return peak;
}

ResponseSpectrum compute_response_spectrum(const TimeSeries& ts,
                                           std::span<const double> periods,
                                           double damping) {
  validate(ts);
  ResponseSpectrum rs;
  rs.damping = damping;
  rs.periods.assign(periods.begin(), periods.end());
  rs.sa_g.resize(periods.size());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    rs.sa_g[i] = sdof_peak_abs_accel(ts, periods[i], damping) / kGravity;
  }
  return rs;
}

SnrProfile SnrProfile::all_pass(std::vector<double> freqs) {
  SnrProfile p;
  p.snr.assign(freqs.size(), 1e9);
  p.freqs = std::move(freqs);
  return p;
}

namespace {

// One-sided smoothed amplitude density of a window: |FFT| * dt, boxcar
// averaged over 0.1 decade in log frequency. Returns grid and values,
// excluding the zero-frequency bin.
struct WindowSpectrum {
  std::vector<double> freqs;
  std::vector<double> amp;
};

WindowSpectrum window_spectrum(std::span<const double> x, double dt) {
  const std::size_t nfft = next_pow2(std::max<std::size_t>(x.size(), 2));
  auto spec = fft_real(x, nfft);
  const std::size_t nf = nfft / 2;
  const double df = 1.0 / (static_cast<double>(nfft) * dt);

  std::vector<double> raw(nf);
  WindowSpectrum out;
  out.freqs.resize(nf);
  for (std::size_t k = 1; k <= nf; ++k) {
    out.freqs[k - 1] = df * static_cast<double>(k);
    raw[k - 1] = std::abs(spec[k]) * dt;
  }
  out.amp.resize(nf);
  const double half = std::pow(10.0, 0.05);
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < nf; ++i) {
    const double f = out.freqs[i];
    while (lo < nf && out.freqs[lo] < f / half) ++lo;
    if (hi < i + 1) hi = i + 1;
    while (hi < nf && out.freqs[hi] <= f * half) ++hi;
    double sum = 0.0;
    for (std::size_t j = lo; j < hi; ++j) sum += raw[j];
    out.amp[i] = sum / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace

SnrProfile compute_snr(const TimeSeries& ts, double p_arrival) {
  validate(ts);
  const double pre = p_arrival - ts.t0;
  if (pre < 1.0 - 1e-9) {
    throw std::runtime_error(
        "compute_snr: record unusable, needs at least 1 s of pre-event noise "
        "before the P arrival");
  }
  const std::size_t n_noise = static_cast<std::size_t>(std::llround(1.0 / ts.dt));
  const std::size_t i_p = static_cast<std::size_t>(std::llround(pre / ts.dt));
  if (i_p < n_noise || i_p + 2 > ts.size()) {
    throw std::runtime_error("compute_snr: arrival outside the trace support");
  }
  const std::size_t i_n0 = i_p - n_noise;

  std::span<const double> all(ts.samples);
  auto noise = window_spectrum(all.subspan(i_n0, n_noise), ts.dt);
  auto signal = window_spectrum(all.subspan(i_p), ts.dt);

  const double t_noise = static_cast<double>(n_noise) * ts.dt;
  const double t_signal = static_cast<double>(ts.size() - i_p) * ts.dt;

  SnrProfile prof;
  prof.noise_start = ts.t0 + static_cast<double>(i_n0) * ts.dt;
  prof.noise_end = prof.noise_start + t_noise;
  prof.freqs = signal.freqs;
  prof.snr.resize(signal.freqs.size());
  for (std::size_t i = 0; i < signal.freqs.size(); ++i) {
    const double ns = interp_clamped(noise.freqs, noise.amp, signal.freqs[i]);
    const double num = signal.amp[i] / std::sqrt(t_signal);
    const double den = ns / std::sqrt(t_noise);
    if (den > 0.0) {
      prof.snr[i] = num / den;
    } else {
      prof.snr[i] = (num > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
    }
  }
  return prof;
}

double snr_at(const SnrProfile& profile, double freq) {
  if (profile.freqs.empty()) {
    throw std::invalid_argument("snr_at: empty profile");
  }
  return interp_clamped(profile.freqs, profile.snr, freq);
}

}  // namespace gmsim
