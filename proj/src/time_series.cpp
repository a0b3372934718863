#include "gmsim/time_series.hpp"

#include <cmath>
#include <stdexcept>

namespace gmsim {

void validate(const TimeSeries& ts) {
  if (!(ts.dt > 0.0)) {
    throw std::invalid_argument("TimeSeries: dt must be positive");
  }
  if (ts.samples.size() < 2) {
    throw std::invalid_argument("TimeSeries: need at least two samples");
  }
  for (double a : ts.samples) {
    if (!std::isfinite(a)) {
      throw std::invalid_argument("TimeSeries: non-finite sample");
    }
  }
}

}  // namespace gmsim
