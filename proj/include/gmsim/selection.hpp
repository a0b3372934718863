#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmsim/signal_metrics.hpp"
#include "gmsim/simulator.hpp"

namespace gmsim {

struct SelectionEntry {
  std::uint64_t index = 0;  // simulation index
  double mse = 0.0;         // mean squared ln-SA misfit over the target periods
};

/// Mean over the target periods of (ln SA_sim - ln SA_target)^2. Spectra
/// with a non-positive ordinate score infinity.
double spectrum_log_mse(const ResponseSpectrum& sim,
                        const ResponseSpectrum& target);

/// The k motions whose spectra best match the target, ascending MSE, ties
/// broken by simulation index. k must not exceed the ensemble size.
std::vector<SelectionEntry> select_best_match(
    std::span<const SyntheticMotion> motions, const ResponseSpectrum& target,
    std::size_t k);

}  // namespace gmsim
