#pragma once

namespace gmsim {

enum class SpectrumForm { as_printed, brune_standard };

/// Source corner frequency, base-10 convention:
/// log10(fc) = 1.341 + log10(beta * stress_drop^(1/3)) - 0.5 * Mw
/// with stress drop in bars and beta in km/s.
double corner_frequency_hz(double mw, double stress_drop_bars, double beta_kms);

/// Omega-square acceleration shape with an eighth-power high-cut whose corner
/// follows the time-varying central frequency:
///   (2 pi f)^2 / (lowband(f/fc) * sqrt(1 + (f/fc_tau)^8))
/// where lowband is sqrt(1 + x^2) in the as_printed form and (1 + x^2) in the
/// brune_standard form.
double source_spectrum(double f, double fc, double fc_tau, SpectrumForm form);

const char* to_string(SpectrumForm f);
SpectrumForm spectrum_form_from_string(const char* s);

}  // namespace gmsim
