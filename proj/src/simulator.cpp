#include "gmsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

#include "gmsim/fft.hpp"
#include "gmsim/rng.hpp"

namespace gmsim {

namespace {
constexpr std::uint64_t kParamStream = 1;
constexpr std::uint64_t kPhaseStream = 2;
}  // namespace

void validate_config(const SimulationConfig& cfg) {
  if (cfg.n_sims < 1) throw std::invalid_argument("config: n_sims must be >= 1");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  if (cfg.truncate_sigma < 0.0) {
    throw std::invalid_argument("config: truncate_sigma must be >= 0");
  }
  auto ordered = [](double lo, double hi) { return lo < hi; };
  if (!ordered(cfg.stress_drop_log10_min, cfg.stress_drop_log10_max) ||
      !ordered(cfg.q0_min, cfg.q0_max) || !ordered(cfg.n_exp_min, cfg.n_exp_max)) {
    throw std::invalid_argument("config: distribution bounds must be ordered");
  }
  if (!(cfg.beta_kms > 0.0)) throw std::invalid_argument("config: beta must be positive");
  if (!(cfg.shape_block_s > 0.0)) {
    throw std::invalid_argument("config: shape_block_s must be positive");
  }
}

ParameterTargets parameter_targets(const CoefficientTable& table,
                                   const Scenario& scenario, HDef hdef) {
  ParameterTargets t;
  t.ai = predict_ai(table, scenario, hdef == HDef::ind ? HDef::gm : hdef);
  t.dsr = predict_dsr(table, scenario, hdef == HDef::am ? HDef::gm : hdef);
  const FcParamsPrediction fc = predict_fc_params(table, scenario);
  t.fc_a = fc.a;
  t.fc_ln_b = fc.ln_b;
  return t;
}

SampledParams sample_params(const SimulationConfig& cfg,
                            const ParameterTargets& targets,
                            std::uint64_t index) {
  SampledParams p;
  p.sub_seed = mix_seed(cfg.master_seed, index);
  SplitMix64 rng(mix_seed(p.sub_seed, kParamStream));
  const double k = cfg.truncate_sigma;
  p.ai = std::exp(rng.truncated_normal(targets.ai.mean_ln, targets.ai.sigma, k));
  p.dsr = std::exp(rng.truncated_normal(targets.dsr.mean_ln, targets.dsr.sigma, k));
  p.fc_a = rng.truncated_normal(targets.fc_a.mean_ln, targets.fc_a.sigma, k);
  p.fc_b = std::exp(
      rng.truncated_normal(targets.fc_ln_b.mean_ln, targets.fc_ln_b.sigma, k));
  p.stress_drop_bars = std::pow(
      10.0, rng.uniform(cfg.stress_drop_log10_min, cfg.stress_drop_log10_max));
  p.q0 = rng.uniform(cfg.q0_min, cfg.q0_max);
  p.n_exp = rng.uniform(cfg.n_exp_min, cfg.n_exp_max);
  return p;
}

double SpectrogramModel::fc_tau(std::size_t block) const {
  const std::size_t k_mid = std::min(block * block_len + block_len / 2, nt - 1);
  const double tau = std::max(dt * static_cast<double>(k_mid) - t_p, 0.0);
  const double f = std::exp(params.fc_a - params.fc_b * std::log(tau + 1.0));
  const double nyquist = 0.5 / dt;
  return std::clamp(f, fc_tau_min_hz, nyquist);
}

void SpectrogramModel::shape_row(std::size_t block, std::span<double> out) const {
  const double fct = fc_tau(block);
  double sum = 0.0;
  for (std::size_t i = 0; i < nf; ++i) {
    const double f = df * static_cast<double>(i + 1);
    out[i] = source_spectrum(f, fc_hz, fct, form);
    sum += out[i];
  }
  sum *= df;
  if (!(sum > 0.0)) {
    throw std::runtime_error("spectrogram: degenerate all-zero slice");
  }
  for (std::size_t i = 0; i < nf; ++i) out[i] /= sum;
}

double SpectrogramModel::ps(std::size_t k, std::size_t i) const {
  std::vector<double> row(nf);
  shape_row(block_of(k), row);
  return energy * pa[k] * row[i];
}

SpectrogramModel build_spectrogram(const SampledParams& params,
                                   const Envelope& env,
                                   const SimulationConfig& cfg) {
  SpectrogramModel m;
  m.dt = env.dt;
  m.nt = env.pa.size();
  m.n_fft = next_pow2(m.nt);
  m.nf = m.n_fft / 2;
  m.df = 1.0 / (static_cast<double>(m.n_fft) * m.dt);
  m.block_len = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.shape_block_s / m.dt)));
  m.energy = (2.0 * kGravity / M_PI) * params.ai;
  m.fc_hz = corner_frequency_hz(cfg.scenario.mw, params.stress_drop_bars,
                                cfg.beta_kms);
  m.t_p = env.t_p;
  m.fc_tau_min_hz = cfg.envelope.fc_tau_min_hz;
  m.form = cfg.spectrum_form;
  m.params = params;
  m.pa = env.pa;
  return m;
}

SyntheticMotion synthesize(const SpectrogramModel& model,
                           const SimulationConfig& cfg) {
  const std::size_t nf = model.nf;
  const std::size_t nt = model.nt;

  SplitMix64 rng(mix_seed(model.params.sub_seed, kPhaseStream));
  std::vector<double> cos_ph(nf), sin_ph(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    const double phase = rng.uniform(-M_PI, M_PI);
    cos_ph[i] = std::cos(phase);
    sin_ph[i] = std::sin(phase);
  }

  SyntheticMotion motion;
  motion.params = model.params;
  motion.ts.dt = model.dt;
  motion.ts.t0 = 0.0;
  motion.ts.samples.assign(nt, 0.0);

  std::vector<double> shape(nf), c(nf), d(nf);
  const double amp_scale = 2.0 * model.energy * model.df;
  for (std::size_t b = 0; b < model.n_blocks(); ++b) {
    model.shape_row(b, shape);
    for (std::size_t i = 0; i < nf; ++i) {
      const double amp = std::sqrt(amp_scale * shape[i]);
      c[i] = amp * cos_ph[i];
      d[i] = amp * sin_ph[i];
    }
    const std::size_t k_end = std::min(nt, (b + 1) * model.block_len);
    for (std::size_t k = b * model.block_len; k < k_end; ++k) {
      const double ang =
          2.0 * M_PI * static_cast<double>(k) / static_cast<double>(model.n_fft);
      const double ca = std::cos(ang);
      const double sa = std::sin(ang);
      double zr = 1.0, zi = 0.0;
      double acc = 0.0;
      for (std::size_t i = 0; i < nf; ++i) {
        const double t = zr * ca - zi * sa;
        zi = zr * sa + zi * ca;
        zr = t;
        acc += c[i] * zr - d[i] * zi;
      }
      motion.ts.samples[k] = std::sqrt(model.pa[k]) * acc;
    }
  }

  if (cfg.exact_energy_rescale) {
    const double measured = compute_arias(motion.ts).ai;
    if (measured > 0.0) {
      const double scale = std::sqrt(model.params.ai / measured);
      for (double& a : motion.ts.samples) a *= scale;
    }
  }
  motion.measured.pga = compute_pga(motion.ts);
  motion.measured.pga_g = motion.measured.pga / kGravity;
  motion.measured.ai = compute_arias(motion.ts).ai;
  if (motion.measured.ai > 0.0) {
    const SignificantDuration d = compute_significant_duration(motion.ts);
    motion.measured.t5 = d.t5;
    motion.measured.t95 = d.t95;
    motion.measured.dsr = d.dsr;
  }
  return motion;
}

SyntheticMotion simulate_one(const SimulationConfig& cfg,
                             const ParameterTargets& targets,
                             std::uint64_t index) {
  const SampledParams params = sample_params(cfg, targets, index);

  EnvelopeInputs ein;
  ein.target_dsr = params.dsr;
  ein.fc_a = params.fc_a;
  ein.fc_b = params.fc_b;
  ein.q0 = params.q0;
  ein.n_exp = params.n_exp;
  ein.rrup_km = cfg.scenario.rrup;
  ein.beta_kms = cfg.beta_kms;
  ein.dt = cfg.dt;

  Envelope env;
  try {
    env = build_envelope(ein, cfg.envelope);
  } catch (EnvelopeCalibrationError& e) {
    const double rel =
        std::abs(e.best().achieved_dsr - params.dsr) / params.dsr;
    if (rel > cfg.duration_accept_rel) throw;
    env = e.take_best();
  }

  const SpectrogramModel model = build_spectrogram(params, env, cfg);
  SyntheticMotion motion = synthesize(model, cfg);
  motion.index = index;
  motion.envelope_dsr = env.achieved_dsr;
  motion.duration_calibrated = env.calibrated;
  return motion;
}

EnsembleResult simulate_ensemble(const SimulationConfig& cfg,
                                 const CoefficientTable& table) {
  validate_config(cfg);
  EnsembleResult result;
  result.range = check_range(cfg.scenario);
  result.targets = parameter_targets(table, cfg.scenario, cfg.hdef);

  const auto n = static_cast<std::size_t>(cfg.n_sims);
  std::vector<std::optional<SyntheticMotion>> slots(n);
  std::vector<std::optional<std::string>> errors(n);

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t n_threads =
      std::min<std::size_t>(n, cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw);

  auto worker = [&](std::size_t first) {
    for (std::size_t i = first; i < n; i += n_threads) {
      try {
        slots[i] = simulate_one(cfg, result.targets, i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (n_threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      result.motions.push_back(std::move(*slots[i]));
    } else {
      result.failures.push_back({i, errors[i] ? *errors[i] : "unknown failure"});
    }
  }
  return result;
}

}  // namespace gmsim
