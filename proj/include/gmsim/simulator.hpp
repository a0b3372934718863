#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmsim/coefficients.hpp"
#include "gmsim/envelope.hpp"
#include "gmsim/gmpe.hpp"
#include "gmsim/signal_metrics.hpp"
#include "gmsim/source_model.hpp"
#include "gmsim/time_series.hpp"

namespace gmsim {

struct SimulationConfig {
  Scenario scenario;
  int n_sims = 1;
  double dt = 0.01;  // s
  std::uint64_t master_seed = 0;
  /// Half-width of the truncated normals for the predicted parameters, in
  /// units of their total sigma. 0 pins every draw to the median.
  double truncate_sigma = 1.0;
  double stress_drop_log10_min = 0.0;  // log10 of bars
  double stress_drop_log10_max = 2.0;
  double q0_min = 45.0;
  double q0_max = 140.0;
  double n_exp_min = 0.5;
  double n_exp_max = 0.9;
  double beta_kms = 3.6;
  SpectrumForm spectrum_form = SpectrumForm::as_printed;
  bool exact_energy_rescale = true;
  HDef hdef = HDef::gm;
  EnvelopeOptions envelope;
  double shape_block_s = 0.2;  // time quantization of the spectral shape
  /// Envelope calibration misses within this relative window are kept (the
  /// coda decay can floor the reachable duration); larger misses fail the
  /// simulation.
  double duration_accept_rel = 0.15;
  int threads = 0;  // 0 = hardware concurrency
};

void validate_config(const SimulationConfig& cfg);

/// Predictions driving the parameter draws.
struct ParameterTargets {
  Prediction ai;
  Prediction dsr;
  Prediction fc_a;
  Prediction fc_ln_b;
};

ParameterTargets parameter_targets(const CoefficientTable& table,
                                   const Scenario& scenario, HDef hdef);

struct SampledParams {
  double ai = 0.0;                // m/s
  double dsr = 0.0;               // s
  double fc_a = 0.0;              // frequency-decay intercept
  double fc_b = 0.0;              // frequency-decay slope, > 0
  double stress_drop_bars = 0.0;  // in [1, 100]
  double q0 = 0.0;
  double n_exp = 0.0;
  std::uint64_t sub_seed = 0;
};

/// Deterministic draw for one simulation: sub_seed = mix_seed(master_seed,
/// index); ln(AI), ln(DSR), A and ln(B) come from +-truncate_sigma truncated
/// normals around the predictions, log10(stress drop), Q0 and N from their
/// uniform ranges. Draw order is fixed.
SampledParams sample_params(const SimulationConfig& cfg,
                            const ParameterTargets& targets,
                            std::uint64_t index);

/// Separable spectrogram PS(t, f) = energy * Pa(t) * shape_t(f), where each
/// shape slice is the source spectrum normalized to unit frequency integral
/// and the high-cut corner follows the sampled frequency decay (quantized to
/// time blocks). The double sum PS * dt * df equals `energy` exactly.
struct SpectrogramModel {
  double dt = 0.0;
  std::size_t nt = 0;      // trace samples
  std::size_t n_fft = 0;   // padded length, power of two
  std::size_t nf = 0;      // synthesis bins, f = (i+1)*df
  std::size_t block_len = 0;
  double df = 0.0;
  double energy = 0.0;     // (2g/pi) * AI
  double fc_hz = 0.0;      // source corner frequency
  double t_p = 0.0;        // P onset
  double fc_tau_min_hz = 0.2;
  SpectrumForm form = SpectrumForm::as_printed;
  SampledParams params;
  std::vector<double> pa;  // intensity envelope, discrete mass 1

  std::size_t n_blocks() const {
    return (nt + block_len - 1) / block_len;
  }
  std::size_t block_of(std::size_t k) const { return k / block_len; }
  /// High-cut corner of one time block, Hz.
  double fc_tau(std::size_t block) const;
  /// Normalized spectral shape of one block; out.size() == nf, and the
  /// frequency integral sum(out) * df is 1.
  void shape_row(std::size_t block, std::span<double> out) const;
  /// Energy density at sample k and frequency bin i (f = (i+1)*df).
  double ps(std::size_t k, std::size_t i) const;
};

SpectrogramModel build_spectrogram(const SampledParams& params,
                                   const Envelope& env,
                                   const SimulationConfig& cfg);

struct SyntheticMotion {
  std::uint64_t index = 0;
  TimeSeries ts;
  SampledParams params;
  ScalarMetrics measured;
  double envelope_dsr = 0.0;        // 5-95% window of the calibrated envelope
  bool duration_calibrated = true;  // envelope met the 2% calibration target
};

/// Fourier-series synthesis with one random phase per bin, drawn from the
/// simulation's sub-seed. With exact_energy_rescale the trace is scaled by a
/// single factor so its measured Arias intensity equals the sampled one.
SyntheticMotion synthesize(const SpectrogramModel& model,
                           const SimulationConfig& cfg);

SyntheticMotion simulate_one(const SimulationConfig& cfg,
                             const ParameterTargets& targets,
                             std::uint64_t index);

struct SimulationFailure {
  std::uint64_t index = 0;
  std::string error;
};

struct EnsembleResult {
  std::vector<SyntheticMotion> motions;  // ascending index, failures omitted
  std::vector<SimulationFailure> failures;
  ParameterTargets targets;
  RangeCheck range;
};

/// Runs n_sims independent simulations. Each is a pure function of
/// (config, master_seed, index), so results are bitwise identical across
/// runs and thread counts.
EnsembleResult simulate_ensemble(const SimulationConfig& cfg,
                                 const CoefficientTable& table = default_table());

}  // namespace gmsim
