#include "gmsim/s_transform.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <stdexcept>

#include "gmsim/fft.hpp"
#include "gmsim/io_util.hpp"
#include "gmsim/numerics.hpp"

namespace gmsim {

double TimeFrequencyMap::peak_time() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < amp.size(); ++i) {
    if (amp[i] > amp[best]) best = i;
  }
  return times[best / freqs.size()];
}

std::vector<double> stransform_freq_grid(const TimeSeries& ts, double f_max,
                                         std::size_t stride_f) {
  validate(ts);
  if (stride_f == 0) stride_f = 1;
  const std::size_t nfft = next_pow2(ts.size());
  const double df = 1.0 / (static_cast<double>(nfft) * ts.dt);
  const double nyq = 0.5 / ts.dt;
  const double cap = std::min(f_max, nyq);
  std::vector<double> out;
  for (std::size_t k = stride_f; ; k += stride_f) {
    const double f = df * static_cast<double>(k);
    if (f > cap * (1.0 + 1e-12)) break;
    out.push_back(f);
  }
  return out;
}

namespace {

struct Grid {
  std::size_t nfft = 0;
  double df = 0.0;
  std::vector<std::size_t> bins;   // DFT bin per requested frequency
  std::vector<std::size_t> t_idx;  // stored sample indices
};

Grid resolve_grid(const TimeSeries& ts, std::span<const double> freqs,
                  std::size_t stride_t) {
  validate(ts);
  if (freqs.empty()) throw std::invalid_argument("s_transform: empty grid");
  if (stride_t == 0) stride_t = 1;
  Grid g;
  g.nfft = next_pow2(ts.size());
  g.df = 1.0 / (static_cast<double>(g.nfft) * ts.dt);
  const double nyq = 0.5 / ts.dt;
  g.bins.reserve(freqs.size());
  for (double f : freqs) {
    if (!(f > 0.0) || f > nyq * (1.0 + 1e-12)) {
      throw std::invalid_argument(
          "s_transform: frequency must lie in (0, Nyquist]");
    }
    const double kf = f / g.df;
    const auto k = static_cast<std::size_t>(std::llround(kf));
    if (k == 0 || std::abs(kf - static_cast<double>(k)) > 1e-6) {
      throw std::invalid_argument(
          "s_transform: frequency must sit on the analysis DFT grid (df = "
          "1/(n_fft*dt))");
    }
    g.bins.push_back(k);
  }
  for (std::size_t j = 0; j * stride_t < ts.size(); ++j) {
    g.t_idx.push_back(j * stride_t);
  }
  return g;
}

}  // namespace

TimeFrequencyMap s_transform(const TimeSeries& ts,
                             std::span<const double> freqs,
                             std::size_t stride_t) {
  const Grid g = resolve_grid(ts, freqs, stride_t);
  const auto spectrum = fft_real(ts.samples, g.nfft);

  TimeFrequencyMap map;
  map.freqs.assign(freqs.begin(), freqs.end());
  map.times.reserve(g.t_idx.size());
  for (std::size_t idx : g.t_idx) map.times.push_back(ts.time_at(idx));
  map.amp.assign(map.times.size() * map.freqs.size(), 0.0);

  const std::size_t n = g.nfft;
  std::vector<std::complex<double>> voice(n);
  for (std::size_t fi = 0; fi < g.bins.size(); ++fi) {
    const std::size_t k = g.bins[fi];
    const double kk = static_cast<double>(k);
    for (std::size_t m = 0; m < n; ++m) {
      const double off = (m <= n / 2) ? static_cast<double>(m)
                                      : static_cast<double>(m) - static_cast<double>(n);
      const double expo = -2.0 * M_PI * M_PI * off * off / (kk * kk);
      if (expo < -120.0) {
        voice[m] = {0.0, 0.0};
        continue;
      }
      voice[m] = spectrum[(m + k) & (n - 1)] * std::exp(expo);
    }
    fft_inplace(voice, true);
    for (std::size_t j = 0; j < g.t_idx.size(); ++j) {
      map.amp[j * map.freqs.size() + fi] = std::abs(voice[g.t_idx[j]]);
    }
  }
  return map;
}

TimeFrequencyMap s_transform_direct(const TimeSeries& ts,
                                    std::span<const double> freqs,
                                    std::size_t stride_t) {
  const Grid g = resolve_grid(ts, freqs, stride_t);
  TimeFrequencyMap map;
  map.freqs.assign(freqs.begin(), freqs.end());
  map.times.reserve(g.t_idx.size());
  for (std::size_t idx : g.t_idx) map.times.push_back(ts.time_at(idx));
  map.amp.assign(map.times.size() * map.freqs.size(), 0.0);

  const double period = static_cast<double>(g.nfft) * ts.dt;
  for (std::size_t fi = 0; fi < g.bins.size(); ++fi) {
    const double f = map.freqs[fi];
    const double norm = f / std::sqrt(2.0 * M_PI);
    const double omega = 2.0 * M_PI * f;
    for (std::size_t j = 0; j < g.t_idx.size(); ++j) {
      const double tau = static_cast<double>(g.t_idx[j]) * ts.dt;
      std::complex<double> acc(0.0, 0.0);
      for (std::size_t nn = 0; nn < ts.size(); ++nn) {
        const double t = static_cast<double>(nn) * ts.dt;
        double w = 0.0;
        for (int wrap = -2; wrap <= 2; ++wrap) {
          const double u = tau - t + static_cast<double>(wrap) * period;
          const double expo = -0.5 * u * u * f * f;
          if (expo > -120.0) w += std::exp(expo);
        }
        if (w == 0.0) continue;
        const double phase = -omega * t;
        acc += ts.samples[nn] * norm * w *
               std::complex<double>(std::cos(phase), std::sin(phase));
      }
      map.amp[j * map.freqs.size() + fi] = std::abs(acc * ts.dt);
    }
  }
  return map;
}

CentralFrequencySeries central_frequency_series(const TimeFrequencyMap& map,
                                                const SnrProfile& snr,
                                                double t_p, double t95) {
  if (map.nt() == 0 || map.nf() == 0) {
    throw std::invalid_argument("central_frequency_series: empty map");
  }
  std::vector<std::size_t> admitted;
  for (std::size_t i = 0; i < map.nf(); ++i) {
    if (snr_at(snr, map.freqs[i]) > 3.0) admitted.push_back(i);
  }
  if (admitted.empty()) {
    throw std::runtime_error(
        "central_frequency_series: no frequency passes the SNR > 3 gate");
  }

  CentralFrequencySeries series;
  series.t_p = t_p;
  series.f_lo = map.freqs[admitted.front()];
  series.f_hi = map.freqs[admitted.back()];
  for (std::size_t it = 0; it < map.nt(); ++it) {
    const double t = map.times[it];
    if (t < t_p - 1e-9 || t > t95 + 1e-9) continue;
    double m0 = 0.0, m2 = 0.0;
    for (std::size_t i : admitted) {
      const double a = map.at(it, i);
      const double p = a * a;
      m0 += p;
      m2 += p * map.freqs[i] * map.freqs[i];
    }
    if (m0 <= 0.0) continue;  // silent slice carries no frequency information
    series.taus.push_back(t - t_p);
    series.fc.push_back(std::sqrt(m2 / m0));
  }
  if (series.taus.empty()) {
    throw std::runtime_error(
        "central_frequency_series: no usable slices between the P arrival "
        "and t95");
  }
  return series;
}

namespace {

struct WindowFit {
  bool usable = false;
  LinearFit ls;
  double tau_start = 0.0, tau_end = 0.0;
  double b() const { return -ls.slope; }
};

WindowFit fit_window(const CentralFrequencySeries& s, double tau_lo,
                     double tau_hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.taus.size(); ++i) {
    if (s.taus[i] < tau_lo - 1e-12 || s.taus[i] > tau_hi + 1e-12) continue;
    if (!(s.fc[i] > 0.0)) continue;
    x.push_back(std::log(s.taus[i] + 1.0));
    y.push_back(std::log(s.fc[i]));
  }
  WindowFit w;
  if (x.size() < 3) return w;
  w.usable = true;
  w.ls = fit_line(x, y);
  w.tau_start = tau_lo;
  w.tau_end = tau_hi;
  return w;
}

FcFit to_fit(const WindowFit& w, FcBranch branch) {
  FcFit f;
  f.a = w.ls.intercept;
  f.b = w.b();
  f.branch = branch;
  f.tau_start = w.tau_start;
  f.tau_end = w.tau_end;
  f.rms_residual = w.ls.rms_residual;
  return f;
}

}  // namespace

FcFit fit_fc_model(const CentralFrequencySeries& series,
                   const TimeFrequencyMap& map) {
  if (series.taus.size() < 3) {
    throw std::invalid_argument("fit_fc_model: need at least three points");
  }
  const double tau_first = series.taus.front();
  const double tau_last = series.taus.back();
  const WindowFit full = fit_window(series, tau_first, tau_last);
  if (full.usable && full.b() > 0.0) return to_fit(full, FcBranch::full);

  const double tau_max = map.peak_time() - series.t_p;
  const WindowFit p_part = fit_window(series, tau_first, tau_max);
  const WindowFit s_part = fit_window(series, tau_max, tau_last);

  if (s_part.usable && s_part.b() >= 0.0) return to_fit(s_part, FcBranch::s_wave);
  if (p_part.usable && p_part.b() > 0.0) return to_fit(p_part, FcBranch::p_wave);
  throw std::runtime_error(
      "fit_fc_model: record unusable, every window gives a non-positive "
      "decay slope");
}

double fc_model(const FcFit& fit, double tau) {
  return std::exp(fit.a - fit.b * std::log(tau + 1.0));
}

const char* to_string(FcBranch b) {
  switch (b) {
    case FcBranch::full: return "full";
    case FcBranch::s_wave: return "S";
    case FcBranch::p_wave: return "P";
  }
  return "?";
}

double pick_p_arrival(const TimeSeries& ts, const PickerOptions& opts) {
  validate(ts);
  const auto n = ts.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + ts.samples[i] * ts.samples[i];
  }
  const auto w_short = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opts.short_window / ts.dt)));
  const auto w_long = std::max<std::size_t>(
      w_short, static_cast<std::size_t>(std::llround(opts.long_window / ts.dt)));
  const auto i_min = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opts.min_history / ts.dt)));

  for (std::size_t i = i_min; i < n; ++i) {
    const std::size_t ls = std::min<std::size_t>(i + 1, w_short);
    const std::size_t ll = std::min<std::size_t>(i + 1, w_long);
    const double sta = (prefix[i + 1] - prefix[i + 1 - ls]) / static_cast<double>(ls);
    const double lta = (prefix[i + 1] - prefix[i + 1 - ll]) / static_cast<double>(ll);
    if (lta > 0.0) {
      if (sta / lta >= opts.threshold) return ts.time_at(i);
    } else if (sta > 0.0) {
      return ts.time_at(i);
    }
  }
  throw std::runtime_error(
      "pick_p_arrival: no trigger; supply the arrival explicitly");
}

void write_map_csv(const TimeFrequencyMap& map, const std::string& path) {
  std::string out = "tau_s,freq_hz,amplitude\n";
  for (std::size_t it = 0; it < map.nt(); ++it) {
    for (std::size_t ifr = 0; ifr < map.nf(); ++ifr) {
      out += to_sig9(map.times[it]);
      out += ',';
      out += to_sig9(map.freqs[ifr]);
      out += ',';
      out += to_sig9(map.at(it, ifr));
      out += '\n';
    }
  }
  atomic_write_file(path, out);
}

}  // namespace gmsim
