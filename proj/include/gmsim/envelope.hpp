#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gmsim {

/// Knobs of the P/S/coda intensity envelope. The P and S pulses are
/// lognormal bumps, the coda is an exponential tail whose rate follows the
/// anelastic decay at the central frequency of the envelope peak. Energy
/// fractions and shapes are configuration so the whole construction can be
/// swapped.
struct EnvelopeOptions {
  double p_fraction = 0.05;
  double s_fraction = 0.85;
  double coda_fraction = 0.10;
  double sigma_p = 0.5;          // lognormal shape of the P pulse
  double sigma_s = 0.6;          // lognormal shape of the S pulse
  double p_median_sp_frac = 0.4; // P median as a fraction of the S-P delay
  double p_median_min = 0.3;     // s
  double pre_pad = 1.0;          // s of silence before the P onset
  double duration_tol = 0.02;    // relative tolerance of the 5-95% window
  int max_iterations = 50;
  double coda_cut_rel = 1e-6;    // truncate where the envelope falls below
                                 // this fraction of its peak
  double fc_tau_min_hz = 0.2;
};

/// Normalized energy envelope Pa(t) on a uniform dt grid; the discrete mass
/// sums to one exactly.
struct Envelope {
  double dt = 0.01;
  double t_p = 0.0;          // P onset, s
  double t_s = 0.0;          // S onset, s
  double t_coda = 0.0;       // coda onset (the S-pulse mode), s
  double s_median = 0.0;     // calibrated S-pulse median, s
  double coda_rate = 0.0;    // 1/s
  double fc_star = 0.0;      // central frequency at the envelope peak, Hz
  double q_factor = 0.0;     // Q0 * fc_star^N
  double achieved_dsr = 0.0; // measured 5-95% window of Pa, s
  bool calibrated = false;   // achieved_dsr within duration_tol of the target
  std::vector<double> pa;

  double total_duration() const {
    return pa.empty() ? 0.0 : dt * static_cast<double>(pa.size() - 1);
  }
};

/// The calibration could not bring the 5-95% energy window of the envelope
/// within tolerance of the target; carries the closest envelope reached.
class EnvelopeCalibrationError : public std::runtime_error {
 public:
  EnvelopeCalibrationError(const std::string& what, Envelope best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const Envelope& best() const { return best_; }
  Envelope take_best() { return std::move(best_); }

 private:
  Envelope best_;
};

struct EnvelopeInputs {
  double target_dsr = 0.0;  // s
  double fc_a = 0.0;        // frequency-decay intercept
  double fc_b = 0.0;        // frequency-decay slope
  double q0 = 0.0;
  double n_exp = 0.0;
  double rrup_km = 0.0;
  double beta_kms = 3.6;
  double dt = 0.01;
};

/// Builds the envelope, iterating the S-pulse time scale until the 5-95%
/// energy window of the full envelope matches target_dsr within
/// duration_tol. Throws EnvelopeCalibrationError when the target cannot be
/// reached (the coda decay puts a floor under the window length).
Envelope build_envelope(const EnvelopeInputs& in, const EnvelopeOptions& opts = {});

}  // namespace gmsim
