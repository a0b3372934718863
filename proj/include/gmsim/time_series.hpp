#pragma once

#include <cstddef>
#include <vector>

namespace gmsim {

inline constexpr double kGravity = 9.81;    // m/s^2
inline constexpr double kGalToMps2 = 0.01;  // 1 gal = 1 cm/s^2

/// Uniformly sampled acceleration trace. Samples are in m/s^2; gal and g
/// appear only at I/O boundaries.
struct TimeSeries {
  std::vector<double> samples;
  double dt = 0.01;  // sample interval, s
  double t0 = 0.0;   // time of samples[0] relative to the trace origin, s

  std::size_t size() const { return samples.size(); }
  double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double duration() const {
    return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1);
  }
};

/// Throws std::invalid_argument unless dt > 0, there are at least two
/// samples and every sample is finite.
void validate(const TimeSeries& ts);

}  // namespace gmsim
