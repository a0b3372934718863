#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmsim/signal_metrics.hpp"
#include "gmsim/time_series.hpp"

namespace gmsim {

/// One strong-motion archive file: a fixed-width ASCII header (key in the
/// first 18 columns, value after) followed by whitespace-separated integer
/// counts. Header spellings vary across recorder firmware; the parser
/// canonicalizes through an alias list.
struct StrongMotionFile {
  std::vector<std::pair<std::string, std::string>> header;  // canonical order
  std::vector<long> counts;

  double sampling_hz = 0.0;
  double duration_s = 0.0;
  double scale_numerator_gal = 0.0;
  double scale_denominator = 0.0;

  double gal_per_count() const { return scale_numerator_gal / scale_denominator; }
  const std::string* find(const std::string& canonical_key) const;
};

struct ParsedRecord {
  StrongMotionFile file;
  TimeSeries ts;  // m/s^2, mean of the first second removed
};

/// Parses header plus counts. Errors carry the offending line number.
ParsedRecord parse_strong_motion(const std::string& text);

/// Raw counts converted to m/s^2 (scale factor and gal conversion only, no
/// mean removal).
std::vector<double> counts_to_mps2(const StrongMotionFile& f);

/// Canonical serialization; parse(write(parse(x))) reproduces the samples of
/// parse(x) exactly.
std::string write_strong_motion(const StrongMotionFile& f);

struct RecordMetadata {
  std::string record_id;
  std::optional<double> mw;
  std::optional<double> depth_km;
  std::optional<double> dist_km;
  std::string dist_type;  // "rrup" or "rhyp"
  std::optional<double> vs30;
  std::string network;
  std::optional<double> pga_gal;
};

struct FilterDecision {
  bool accepted = false;
  std::string rule;  // first failing rule; empty when accepted
};

using MagnitudeDistancePredicate = std::function<bool(double mw, double dist_km)>;

/// Dataset selection: accept iff mw >= 4.5, vs30 >= 500 m/s, depth <= 25 km
/// and pga >= 2.5 gal, in that order; an externally supplied
/// magnitude-distance predicate may reject afterwards. Missing fields reject
/// with "incomplete-metadata".
FilterDecision apply_dataset_filters(
    const RecordMetadata& meta,
    const MagnitudeDistancePredicate& mag_dist = nullptr);

/// Same rules with the PGA taken from measured metrics instead of the
/// metadata row.
FilterDecision apply_dataset_filters(
    const RecordMetadata& meta, const ScalarMetrics& metrics,
    const MagnitudeDistancePredicate& mag_dist = nullptr);

/// Metadata CSV with header record_id,mw,depth_km,dist_km,dist_type,vs30,
/// network,pga_gal (order free, blank cells allowed).
std::vector<RecordMetadata> parse_metadata_csv(const std::string& text);

}  // namespace gmsim
