#include "gmsim/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmsim {

double spectrum_log_mse(const ResponseSpectrum& sim,
                        const ResponseSpectrum& target) {
  if (sim.periods.size() != target.periods.size() || sim.periods.empty()) {
    throw std::invalid_argument("spectrum_log_mse: period grids differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < sim.periods.size(); ++i) {
    if (!(sim.sa_g[i] > 0.0) || !(target.sa_g[i] > 0.0)) {
      return std::numeric_limits<double>::infinity();
    }
    const double e = std::log(sim.sa_g[i]) - std::log(target.sa_g[i]);
    sum += e * e;
  }
  return sum / static_cast<double>(sim.periods.size());
}

std::vector<SelectionEntry> select_best_match(
    std::span<const SyntheticMotion> motions, const ResponseSpectrum& target,
    std::size_t k) {
  if (motions.empty()) {
    throw std::invalid_argument("select_best_match: empty ensemble");
  }
  if (k > motions.size()) {
    throw std::invalid_argument("select_best_match: k exceeds the ensemble size");
  }
  std::vector<SelectionEntry> scored;
  scored.reserve(motions.size());
  for (const auto& m : motions) {
    const ResponseSpectrum rs =
        compute_response_spectrum(m.ts, target.periods, target.damping);
    scored.push_back({m.index, spectrum_log_mse(rs, target)});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.mse != b.mse) return a.mse < b.mse;
    return a.index < b.index;
  });
  scored.resize(k);
  return scored;
}

}  // namespace gmsim
