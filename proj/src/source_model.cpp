#include "gmsim/source_model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace gmsim {

double corner_frequency_hz(double mw, double stress_drop_bars, double beta_kms) {
  if (!(stress_drop_bars > 0.0) || !(beta_kms > 0.0)) {
    throw std::invalid_argument("corner_frequency_hz: stress drop and beta must be positive");
  }
  const double log_fc =
      1.341 + std::log10(beta_kms * std::cbrt(stress_drop_bars)) - 0.5 * mw;
  return std::pow(10.0, log_fc);
}

double source_spectrum(double f, double fc, double fc_tau, SpectrumForm form) {
  const double w = 2.0 * M_PI * f;
  const double x2 = (f / fc) * (f / fc);
  const double lowband =
      (form == SpectrumForm::brune_standard) ? (1.0 + x2) : std::sqrt(1.0 + x2);
  const double r = f / fc_tau;
  const double r4 = r * r * r * r;
  const double highcut = std::sqrt(1.0 + r4 * r4);
  return w * w / (lowband * highcut);
}

const char* to_string(SpectrumForm f) {
  return f == SpectrumForm::brune_standard ? "brune-standard" : "as-printed";
}

SpectrumForm spectrum_form_from_string(const char* s) {
  if (std::strcmp(s, "as-printed") == 0) return SpectrumForm::as_printed;
  if (std::strcmp(s, "brune-standard") == 0) return SpectrumForm::brune_standard;
  throw std::invalid_argument(std::string("unknown spectrum form '") + s + "'");
}

}  // namespace gmsim
