#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numeric>

#include "gmsim/envelope.hpp"
#include "gmsim/fft.hpp"
#include "gmsim/rng.hpp"
#include "gmsim/selection.hpp"
#include "gmsim/simulator.hpp"
#include "gmsim/source_model.hpp"

using namespace gmsim;

namespace {

SimulationConfig base_config() {
  SimulationConfig cfg;
  cfg.scenario = {5.6, 20.0, 800.0};
  cfg.n_sims = 1;
  cfg.master_seed = 42;
  return cfg;
}

bool same_params(const SampledParams& a, const SampledParams& b) {
  return a.ai == b.ai && a.dsr == b.dsr && a.fc_a == b.fc_a &&
         a.fc_b == b.fc_b && a.stress_drop_bars == b.stress_drop_bars &&
         a.q0 == b.q0 && a.n_exp == b.n_exp && a.sub_seed == b.sub_seed;
}

}  // namespace

TEST_CASE("corner frequency against direct formula evaluation") {
  // Independent evaluation of the base-10 expression.
  const double oracle =
      std::pow(10.0, 1.341 + std::log10(3.6 * std::cbrt(10.0)) - 0.5 * 5.0);
  CHECK(oracle == doctest::Approx(0.5378).epsilon(2e-4));
  CHECK(corner_frequency_hz(5.0, 10.0, 3.6) ==
        doctest::Approx(oracle).epsilon(1e-9));

  const double oracle1 =
      std::pow(10.0, 1.341 + std::log10(3.6) - 0.5 * 5.0);
  CHECK(oracle1 == doctest::Approx(0.2497).epsilon(3e-4));
  CHECK(corner_frequency_hz(5.0, 1.0, 3.6) ==
        doctest::Approx(oracle1).epsilon(1e-9));
}

TEST_CASE("two magnitude units divide the corner frequency by ten") {
  const double f5 = corner_frequency_hz(5.0, 25.0, 3.6);
  const double f7 = corner_frequency_hz(7.0, 25.0, 3.6);
  CHECK(f7 == doctest::Approx(f5 / 10.0).epsilon(1e-12));
}

TEST_CASE("source spectrum limits") {
  CHECK(source_spectrum(0.0, 1.0, 10.0, SpectrumForm::as_printed) == 0.0);

  // At the corner with the high-cut far away the printed form attenuates by
  // sqrt(2).
  const double fc = 2.0;
  const double w2 = std::pow(2.0 * M_PI * fc, 2);
  CHECK(source_spectrum(fc, fc, 1e9, SpectrumForm::as_printed) ==
        doctest::Approx(w2 / std::sqrt(2.0)).epsilon(1e-12));

  // At the high-cut corner, far above fc, the high-cut radical contributes
  // another sqrt(2).
  const double fct = 100.0, fc_small = 0.01;
  const double no_cut =
      std::pow(2.0 * M_PI * fct, 2) / std::sqrt(1.0 + std::pow(fct / fc_small, 2));
  CHECK(source_spectrum(fct, fc_small, fct, SpectrumForm::as_printed) ==
        doctest::Approx(no_cut / std::sqrt(2.0)).epsilon(1e-12));

  // Brune-standard form squares the low-band radical.
  CHECK(source_spectrum(fc, fc, 1e9, SpectrumForm::brune_standard) ==
        doctest::Approx(w2 / 2.0).epsilon(1e-12));
}

TEST_CASE("sampled parameters are deterministic and bounded") {
  const SimulationConfig cfg = base_config();
  const auto targets = parameter_targets(default_table(), cfg.scenario, cfg.hdef);
  const SampledParams a = sample_params(cfg, targets, 3);
  const SampledParams b = sample_params(cfg, targets, 3);
  CHECK(same_params(a, b));
  CHECK_FALSE(same_params(a, sample_params(cfg, targets, 4)));

  for (std::uint64_t i = 0; i < 200; ++i) {
    const SampledParams p = sample_params(cfg, targets, i);
    CHECK(p.stress_drop_bars >= 1.0);
    CHECK(p.stress_drop_bars <= 100.0);
    CHECK(p.q0 >= 45.0);
    CHECK(p.q0 <= 140.0);
    CHECK(p.n_exp >= 0.5);
    CHECK(p.n_exp <= 0.9);
    CHECK(p.fc_b > 0.0);
    CHECK(std::abs(std::log(p.ai) - targets.ai.mean_ln) <=
          targets.ai.sigma + 1e-12);
    CHECK(std::abs(std::log(p.dsr) - targets.dsr.mean_ln) <=
          targets.dsr.sigma + 1e-12);
  }
}

TEST_CASE("zero truncation pins predicted parameters to their medians") {
  SimulationConfig cfg = base_config();
  cfg.truncate_sigma = 0.0;
  const auto targets = parameter_targets(default_table(), cfg.scenario, cfg.hdef);
  const SampledParams p0 = sample_params(cfg, targets, 0);
  const SampledParams p1 = sample_params(cfg, targets, 1);
  CHECK(p0.ai == doctest::Approx(std::exp(targets.ai.mean_ln)).epsilon(1e-12));
  CHECK(p0.dsr == doctest::Approx(std::exp(targets.dsr.mean_ln)).epsilon(1e-12));
  CHECK(p0.fc_a == doctest::Approx(targets.fc_a.mean_ln).epsilon(1e-12));
  CHECK(p0.ai == p1.ai);
  // the uniform draws still explore their ranges
  CHECK(p0.stress_drop_bars != p1.stress_drop_bars);
}

TEST_CASE("stress-drop draws reproduce the uniform log moments") {
  const SimulationConfig cfg = base_config();
  const auto targets = parameter_targets(default_table(), cfg.scenario, cfg.hdef);
  const int n = 100000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    mean += std::log10(sample_params(cfg, targets, i).stress_drop_bars);
  }
  mean /= n;
  // Uniform(0,2): mean 1, sd 2/sqrt(12); allow a 3-sigma band on the sample
  // mean.
  const double band = 3.0 * (2.0 / std::sqrt(12.0)) / std::sqrt(double(n));
  CHECK(std::abs(mean - 1.0) < band);
}

TEST_CASE("truncated normal respects its bounds and center") {
  SplitMix64 rng(7);
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.truncated_normal(2.0, 0.5, 1.0);
    CHECK(x >= 1.5 - 1e-12);
    CHECK(x <= 2.5 + 1e-12);
    mean += x;
  }
  mean /= n;
  CHECK(mean == doctest::Approx(2.0).epsilon(2e-3));
}

TEST_CASE("envelope integrates to one and honors the geometry") {
  EnvelopeInputs in;
  in.target_dsr = 10.0;
  in.fc_a = 3.0;
  in.fc_b = 0.25;
  in.q0 = 90.0;
  in.n_exp = 0.7;
  in.rrup_km = 30.0;
  in.dt = 0.01;
  const Envelope env = build_envelope(in);

  double mass = 0.0;
  for (double x : env.pa) {
    CHECK(x >= 0.0);
    mass += x * env.dt;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(env.calibrated);
  CHECK(env.achieved_dsr >= 0.98 * 10.0);
  CHECK(env.achieved_dsr <= 1.02 * 10.0);

  const double alpha = std::sqrt(3.0) * in.beta_kms;
  CHECK(env.t_s - env.t_p ==
        doctest::Approx(30.0 * (1.0 / in.beta_kms - 1.0 / alpha)).epsilon(1e-12));
  CHECK(env.t_p == doctest::Approx(1.0));
}

TEST_CASE("zero distance collapses the phase onsets") {
  EnvelopeInputs in;
  in.target_dsr = 6.0;
  in.fc_a = 3.2;
  in.fc_b = 0.3;
  in.q0 = 60.0;
  in.n_exp = 0.6;
  in.rrup_km = 0.0;
  in.dt = 0.01;
  const Envelope env = build_envelope(in);
  CHECK(env.t_p == env.t_s);
}

TEST_CASE("unreachably short targets fail carrying the floor") {
  EnvelopeInputs in;
  in.target_dsr = 0.8;  // far below what the coda tail allows
  in.fc_a = 2.9;
  in.fc_b = 0.2;
  in.q0 = 140.0;
  in.n_exp = 0.9;
  in.rrup_km = 30.0;
  in.dt = 0.01;
  try {
    build_envelope(in);
    FAIL("calibration should not reach 0.8 s");
  } catch (const EnvelopeCalibrationError& e) {
    CHECK(e.best().achieved_dsr > 0.8);
    CHECK_FALSE(e.best().calibrated);
    CHECK(e.best().pa.size() > 2);
  }
}

TEST_CASE("calibration tracks random targets across the sampling space") {
  SplitMix64 rng(2024);
  int calibrated = 0, attempts = 0;
  for (int trial = 0; trial < 24; ++trial) {
    EnvelopeInputs in;
    in.target_dsr = std::exp(rng.uniform(std::log(4.0), std::log(30.0)));
    in.fc_a = rng.uniform(2.2, 3.6);
    in.fc_b = rng.uniform(0.1, 0.5);
    in.q0 = rng.uniform(45.0, 140.0);
    in.n_exp = rng.uniform(0.5, 0.9);
    in.rrup_km = rng.uniform(0.0, 60.0);
    in.dt = 0.01;
    ++attempts;
    try {
      const Envelope env = build_envelope(in);
      CHECK(std::abs(env.achieved_dsr - in.target_dsr) <= 0.02 * in.target_dsr);
      ++calibrated;
    } catch (const EnvelopeCalibrationError&) {
      // short targets against slow codas are genuinely unreachable
    }
  }
  CHECK(calibrated >= attempts * 3 / 4);
}

TEST_CASE("spectrogram slices normalize and book the energy exactly") {
  SimulationConfig cfg = base_config();
  const auto targets = parameter_targets(default_table(), cfg.scenario, cfg.hdef);
  const SampledParams params = sample_params(cfg, targets, 5);

  EnvelopeInputs in;
  in.target_dsr = params.dsr;
  in.fc_a = params.fc_a;
  in.fc_b = params.fc_b;
  in.q0 = params.q0;
  in.n_exp = params.n_exp;
  in.rrup_km = cfg.scenario.rrup;
  in.dt = cfg.dt;
  const Envelope env = build_envelope(in);
  const SpectrogramModel model = build_spectrogram(params, env, cfg);

  std::vector<double> row(model.nf);
  for (std::size_t b = 0; b < model.n_blocks(); ++b) {
    model.shape_row(b, row);
    double s = 0.0;
    for (double v : row) s += v;
    CHECK(s * model.df == doctest::Approx(1.0).epsilon(1e-9));
  }

  // sum over t and f of PS dt df = energy, via the factorized pieces
  double pa_mass = 0.0;
  for (double v : model.pa) pa_mass += v * model.dt;
  CHECK(model.energy * pa_mass ==
        doctest::Approx((2.0 * kGravity / M_PI) * params.ai).epsilon(1e-9));

  // high-cut corner decays over the trace
  CHECK(model.fc_tau(0) >= model.fc_tau(model.n_blocks() - 1));
}

TEST_CASE("stress drop moves the spectral centroid upward") {
  SimulationConfig cfg = base_config();
  const auto targets = parameter_targets(default_table(), cfg.scenario, cfg.hdef);
  SampledParams params = sample_params(cfg, targets, 1);

  EnvelopeInputs in;
  in.target_dsr = params.dsr;
  in.fc_a = params.fc_a;
  in.fc_b = params.fc_b;
  in.q0 = params.q0;
  in.n_exp = params.n_exp;
  in.rrup_km = cfg.scenario.rrup;
  in.dt = cfg.dt;
  const Envelope env = build_envelope(in);

  auto centroid = [&](double stress_bars) {
    SampledParams p = params;
    p.stress_drop_bars = stress_bars;
    const SpectrogramModel m = build_spectrogram(p, env, cfg);
    std::vector<double> row(m.nf);
    m.shape_row(m.n_blocks() / 2, row);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < m.nf; ++i) {
      const double f = m.df * static_cast<double>(i + 1);
      m0 += row[i];
      m1 += row[i] * f;
    }
    return m1 / m0;
  };
  CHECK(centroid(100.0) > centroid(1.0));
}

TEST_CASE("stationary synthesis decomposes into cosines of the booked amplitude") {
  // With a flat envelope spanning the whole padded window, the output is
  // exactly sum_n amp_n cos(2 pi n k / N + phase_n); every bin of its DFT
  // must return amp_n = sqrt(2 PS df).
  SimulationConfig cfg = base_config();
  cfg.exact_energy_rescale = false;

  SpectrogramModel m;
  m.dt = 0.01;
  m.nt = 1024;
  m.n_fft = 1024;
  m.nf = 512;
  m.df = 1.0 / (1024 * 0.01);
  m.block_len = 1024;  // a single shape block
  m.energy = 2.5;
  m.fc_hz = 0.8;
  m.t_p = 0.0;
  m.fc_tau_min_hz = 0.2;
  m.form = SpectrumForm::as_printed;
  m.params.sub_seed = mix_seed(99, 0);
  m.params.ai = M_PI * m.energy / (2.0 * kGravity);
  m.params.fc_a = std::log(12.0);
  m.params.fc_b = 0.0;  // stationary high-cut
  m.pa.assign(m.nt, 1.0 / (m.dt * static_cast<double>(m.nt)));

  const SyntheticMotion motion = synthesize(m, cfg);
  REQUIRE(motion.ts.samples.size() == m.nt);

  auto spec = fft_real(motion.ts.samples, m.n_fft);
  std::vector<double> shape(m.nf);
  m.shape_row(0, shape);
  for (std::size_t i = 0; i + 1 < m.nf; i += 7) {
    const double ps = m.energy * m.pa[0] * shape[i];
    const double expected = std::sqrt(2.0 * ps * m.df);
    const double measured =
        2.0 * std::abs(spec[i + 1]) / static_cast<double>(m.n_fft);
    CHECK(measured == doctest::Approx(expected).epsilon(1e-9));
  }

  // Zero energy density synthesizes a zero trace.
  SpectrogramModel z = m;
  z.energy = 0.0;
  const SyntheticMotion quiet = synthesize(z, cfg);
  for (double x : quiet.ts.samples) CHECK(x == 0.0);
}

TEST_CASE("exact energy rescale pins the measured Arias intensity") {
  SimulationConfig cfg = base_config();
  cfg.scenario = {5.0, 50.0, 550.0};
  cfg.n_sims = 8;
  cfg.master_seed = 7;
  const EnsembleResult r = simulate_ensemble(cfg);
  REQUIRE(r.failures.empty());
  for (const auto& m : r.motions) {
    CHECK(std::abs(m.measured.ai - m.params.ai) / m.params.ai < 1e-9);
  }
}

TEST_CASE("without rescale the ensemble energy is right on average") {
  SimulationConfig cfg = base_config();
  cfg.exact_energy_rescale = false;
  cfg.n_sims = 60;
  cfg.master_seed = 11;
  const EnsembleResult r = simulate_ensemble(cfg);
  REQUIRE(r.motions.size() > 50);
  double ratio = 0.0;
  for (const auto& m : r.motions) ratio += m.measured.ai / m.params.ai;
  ratio /= static_cast<double>(r.motions.size());
  CHECK(ratio > 0.85);
  CHECK(ratio < 1.15);
}

TEST_CASE("ensembles are bitwise reproducible across thread counts") {
  SimulationConfig cfg = base_config();
  cfg.n_sims = 6;
  cfg.master_seed = 1234;
  cfg.threads = 1;
  const EnsembleResult a = simulate_ensemble(cfg);
  cfg.threads = 4;
  const EnsembleResult b = simulate_ensemble(cfg);
  REQUIRE(a.motions.size() == b.motions.size());
  for (std::size_t i = 0; i < a.motions.size(); ++i) {
    CHECK(a.motions[i].index == b.motions[i].index);
    REQUIRE(a.motions[i].ts.samples.size() == b.motions[i].ts.samples.size());
    for (std::size_t k = 0; k < a.motions[i].ts.samples.size(); ++k) {
      CHECK(a.motions[i].ts.samples[k] == b.motions[i].ts.samples[k]);
    }
  }
}

TEST_CASE("a single simulation equals the first ensemble member") {
  SimulationConfig cfg = base_config();
  cfg.n_sims = 3;
  const EnsembleResult r = simulate_ensemble(cfg);
  const auto targets = parameter_targets(default_table(), cfg.scenario, cfg.hdef);
  const SyntheticMotion one = simulate_one(cfg, targets, 0);
  REQUIRE_FALSE(r.motions.empty());
  CHECK(one.ts.samples == r.motions.front().ts.samples);
}

TEST_CASE("per-simulation failures are aggregated with indices") {
  // A one-bar stress ceiling is fine, but an absurd duration target cannot
  // be reached: force failures through a tiny duration acceptance window and
  // a scenario whose coda floor exceeds it.
  SimulationConfig cfg = base_config();
  cfg.scenario = {4.5, 1.0, 550.0};  // short predicted durations
  cfg.n_sims = 40;
  cfg.master_seed = 5;
  cfg.duration_accept_rel = 0.0;  // refuse every calibration miss
  const EnsembleResult r = simulate_ensemble(cfg);
  CHECK(r.motions.size() + r.failures.size() == 40);
  CHECK_FALSE(r.failures.empty());
  for (const auto& f : r.failures) {
    CHECK(f.index < 40);
    CHECK_FALSE(f.error.empty());
  }
}

TEST_CASE("selection ranks a planted match first and keeps ties stable") {
  SimulationConfig cfg = base_config();
  cfg.scenario = {5.0, 50.0, 550.0};
  cfg.n_sims = 12;
  cfg.master_seed = 77;
  const EnsembleResult r = simulate_ensemble(cfg);
  REQUIRE(r.motions.size() >= 10);

  const std::vector<double> periods{0.0, 0.0384, 0.097, 0.234, 0.469, 1.3622};
  const ResponseSpectrum target =
      compute_response_spectrum(r.motions[4].ts, periods);

  const auto ranked = select_best_match(r.motions, target, r.motions.size());
  CHECK(ranked.front().index == r.motions[4].index);
  CHECK(ranked.front().mse == doctest::Approx(0.0).epsilon(1e-15));
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    const bool ordered = ranked[i - 1].mse < ranked[i].mse ||
                         (ranked[i - 1].mse == ranked[i].mse &&
                          ranked[i - 1].index < ranked[i].index);
    CHECK(ordered);
  }

  const auto top3 = select_best_match(r.motions, target, 3);
  CHECK(top3.size() == 3);
  CHECK(select_best_match(r.motions, target, 0).empty());
  CHECK_THROWS_AS(select_best_match(r.motions, target, r.motions.size() + 1),
                  std::invalid_argument);
}

TEST_CASE("duration closure holds for most of a small ensemble") {
  SimulationConfig cfg = base_config();
  cfg.scenario = {5.0, 50.0, 550.0};
  cfg.n_sims = 30;
  cfg.master_seed = 2025;
  const EnsembleResult r = simulate_ensemble(cfg);
  REQUIRE(r.motions.size() + r.failures.size() == 30);
  int within = 0;
  for (const auto& m : r.motions) {
    if (std::abs(m.measured.dsr - m.params.dsr) / m.params.dsr < 0.15) ++within;
  }
  CHECK(within >= static_cast<int>(r.motions.size() * 8 / 10));
}
