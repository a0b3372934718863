#include "gmsim/strong_motion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gmsim/io_util.hpp"

namespace gmsim {

namespace {

const char* kCanonicalKeys[] = {
    "ORIGIN TIME",    "LAT.",           "LONG.",
    "DEPTH. (km)",    "MAG.",           "STATION CODE",
    "STATION LAT.",   "STATION LONG.",  "STATION HEIGHT(m)",
    "RECORD TIME",    "SAMPLING FREQ(Hz)", "DURATION TIME(s)",
    "DIR.",           "SCALE FACTOR",   "MAX. ACC. (gal)",
    "LAST CORRECTION", "MEMO.",
};

const char* kMandatoryKeys[] = {
    "ORIGIN TIME", "LAT.",         "LONG.",        "DEPTH. (km)",
    "MAG.",        "STATION CODE", "STATION LAT.", "STATION LONG.",
    "SAMPLING FREQ(Hz)", "DURATION TIME(s)", "DIR.", "SCALE FACTOR",
    "MAX. ACC. (gal)",   "LAST CORRECTION",
};

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Spellings seen across recorder firmware eras, uppercased.
const std::map<std::string, std::string>& alias_map() {
  static const std::map<std::string, std::string> m = [] {
    std::map<std::string, std::string> a;
    for (const char* k : kCanonicalKeys) a[upper(k)] = k;
    a["LAT"] = "LAT.";
    a["EPICENTER LAT."] = "LAT.";
    a["LONG"] = "LONG.";
    a["LON."] = "LONG.";
    a["EPICENTER LONG."] = "LONG.";
    a["DEPTH.(KM)"] = "DEPTH. (km)";
    a["DEPTH (KM)"] = "DEPTH. (km)";
    a["DEPTH(KM)"] = "DEPTH. (km)";
    a["MAG"] = "MAG.";
    a["MAGNITUDE"] = "MAG.";
    a["SITE CODE"] = "STATION CODE";
    a["STATION HEIGHT (M)"] = "STATION HEIGHT(m)";
    a["SAMPLING FREQUENCY(HZ)"] = "SAMPLING FREQ(Hz)";
    a["SAMPLING FREQ"] = "SAMPLING FREQ(Hz)";
    a["SAMPLING RATE(HZ)"] = "SAMPLING FREQ(Hz)";
    a["DURATION(S)"] = "DURATION TIME(s)";
    a["DURATION TIME"] = "DURATION TIME(s)";
    a["DIRECTION"] = "DIR.";
    a["COMP."] = "DIR.";
    a["COMPONENT"] = "DIR.";
    a["MAX. ACC.(GAL)"] = "MAX. ACC. (gal)";
    a["MAX ACC. (GAL)"] = "MAX. ACC. (gal)";
    a["PEAK ACC. (GAL)"] = "MAX. ACC. (gal)";
    a["CORRECTION TIME"] = "LAST CORRECTION";
    a["MEMO"] = "MEMO.";
    return a;
  }();
  return m;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("strong-motion parse error, line " +
                           std::to_string(line_no) + ": " + what);
}

bool all_integer_tokens(const std::string& line) {
  std::istringstream ss(line);
  std::string tok;
  bool any = false;
  while (ss >> tok) {
    any = true;
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) return false;
  }
  return any;
}

double numeric_prefix(const std::string& s, std::size_t line_no,
                      const char* what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str()) parse_fail(line_no, std::string("cannot read ") + what);
  return v;
}

}  // namespace

const std::string* StrongMotionFile::find(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return &v;
  }
  return nullptr;
}

ParsedRecord parse_strong_motion(const std::string& text) {
  ParsedRecord rec;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool in_header = true;
  std::map<std::string, std::size_t> key_lines;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_header) {
      if (all_integer_tokens(line)) {
        in_header = false;
      } else {
        if (trim(line).empty()) continue;
        std::string key, value;
        if (line.size() > 18) {
          key = trim(line.substr(0, 18));
          value = trim(line.substr(18));
        } else {
          key = trim(line);
        }
        const auto it = alias_map().find(upper(key));
        if (it == alias_map().end()) {
          parse_fail(line_no, "unknown header key '" + key + "'");
        }
        rec.file.header.emplace_back(it->second, value);
        key_lines[it->second] = line_no;
        continue;
      }
    }
    // Data line: whitespace-separated integer counts.
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      long value = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        parse_fail(line_no, "non-integer sample token '" + tok + "'");
      }
      rec.file.counts.push_back(value);
    }
  }

  for (const char* key : kMandatoryKeys) {
    if (!rec.file.find(key)) {
      throw std::runtime_error(std::string("strong-motion parse error: missing "
                                           "mandatory header key '") +
                               key + "'");
    }
  }
  if (rec.file.counts.size() < 2) {
    throw std::runtime_error("strong-motion parse error: no sample block");
  }

  auto& f = rec.file;
  const std::string& freq_str = *f.find("SAMPLING FREQ(Hz)");
  f.sampling_hz = numeric_prefix(freq_str, key_lines["SAMPLING FREQ(Hz)"],
                                 "sampling frequency");
  if (f.sampling_hz != 100.0 && f.sampling_hz != 200.0) {
    parse_fail(key_lines["SAMPLING FREQ(Hz)"],
               "sampling frequency must be 100 or 200 Hz");
  }
  f.duration_s = numeric_prefix(*f.find("DURATION TIME(s)"),
                                key_lines["DURATION TIME(s)"], "duration");

  {
    const std::size_t ln = key_lines["SCALE FACTOR"];
    std::string s = trim(*f.find("SCALE FACTOR"));
    const std::size_t gal = upper(s).find("(GAL)");
    const std::size_t slash = s.find('/');
    if (gal == std::string::npos || slash == std::string::npos || slash < gal) {
      parse_fail(ln, "scale factor must look like '<num>(gal)/<den>'");
    }
    f.scale_numerator_gal = numeric_prefix(s.substr(0, gal), ln, "scale numerator");
    f.scale_denominator = numeric_prefix(s.substr(slash + 1), ln, "scale denominator");
    if (!(f.scale_denominator > 0.0)) parse_fail(ln, "scale denominator must be positive");
  }

  rec.ts.dt = 1.0 / f.sampling_hz;
  rec.ts.t0 = 0.0;
  rec.ts.samples = counts_to_mps2(f);

  const double n_dt = static_cast<double>(rec.ts.samples.size()) * rec.ts.dt;
  if (std::abs(n_dt - f.duration_s) > rec.ts.dt + 1e-9) {
    throw std::runtime_error(
        "strong-motion parse error: sample count times dt (" +
        std::to_string(n_dt) + " s) disagrees with the header duration (" +
        std::to_string(f.duration_s) + " s)");
  }

  // Pre-event baseline: mean of the first second.
  const std::size_t n_pre = std::min<std::size_t>(
      rec.ts.samples.size(),
      static_cast<std::size_t>(std::llround(1.0 / rec.ts.dt)));
  double mean = 0.0;
  for (std::size_t i = 0; i < n_pre; ++i) mean += rec.ts.samples[i];
  mean /= static_cast<double>(n_pre);
  for (double& a : rec.ts.samples) a -= mean;
  return rec;
}

std::vector<double> counts_to_mps2(const StrongMotionFile& f) {
  const double scale = f.gal_per_count() * kGalToMps2;
  std::vector<double> out;
  out.reserve(f.counts.size());
  for (long c : f.counts) out.push_back(static_cast<double>(c) * scale);
  return out;
}

std::string write_strong_motion(const StrongMotionFile& f) {
  std::string out;
  for (const auto& [key, value] : f.header) {
    std::string line = key;
    line.resize(18, ' ');
    line += value;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  for (std::size_t i = 0; i < f.counts.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%9ld", f.counts[i]);
    out += buf;
    if ((i + 1) % 8 == 0 || i + 1 == f.counts.size()) out += '\n';
  }
  return out;
}

FilterDecision apply_dataset_filters(const RecordMetadata& meta,
                                     const MagnitudeDistancePredicate& mag_dist) {
  if (!meta.mw || !meta.vs30 || !meta.depth_km || !meta.pga_gal ||
      (mag_dist && !meta.dist_km)) {
    return {false, "incomplete-metadata"};
  }
  if (*meta.mw < 4.5) return {false, "magnitude"};
  if (*meta.vs30 < 500.0) return {false, "vs30"};
  if (*meta.depth_km > 25.0) return {false, "depth"};
  if (*meta.pga_gal < 2.5) return {false, "pga"};
  if (mag_dist && !mag_dist(*meta.mw, *meta.dist_km)) {
    return {false, "magnitude-distance"};
  }
  return {true, ""};
}

FilterDecision apply_dataset_filters(const RecordMetadata& meta,
                                     const ScalarMetrics& metrics,
                                     const MagnitudeDistancePredicate& mag_dist) {
  RecordMetadata patched = meta;
  patched.pga_gal = metrics.pga / kGalToMps2;
  return apply_dataset_filters(patched, mag_dist);
}

std::vector<RecordMetadata> parse_metadata_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("metadata CSV: empty file");
  }
  const auto header = split_csv_line(line);
  auto col = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  const auto c_id = col("record_id");
  const auto c_mw = col("mw");
  const auto c_depth = col("depth_km");
  const auto c_dist = col("dist_km");
  const auto c_dtyp = col("dist_type");
  const auto c_vs = col("vs30");
  const auto c_net = col("network");
  const auto c_pga = col("pga_gal");
  if (c_id < 0 || c_mw < 0 || c_depth < 0 || c_vs < 0 || c_pga < 0) {
    throw std::runtime_error(
        "metadata CSV: header must name record_id,mw,depth_km,vs30,pga_gal");
  }
  std::vector<RecordMetadata> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    auto cell = [&](std::ptrdiff_t c) -> std::string {
      return (c >= 0 && static_cast<std::size_t>(c) < cells.size())
                 ? cells[static_cast<std::size_t>(c)]
                 : std::string();
    };
    RecordMetadata m;
    m.record_id = trim(cell(c_id));
    m.mw = parse_double(cell(c_mw));
    m.depth_km = parse_double(cell(c_depth));
    m.dist_km = parse_double(cell(c_dist));
    m.dist_type = trim(cell(c_dtyp));
    m.vs30 = parse_double(cell(c_vs));
    m.network = trim(cell(c_net));
    m.pga_gal = parse_double(cell(c_pga));
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace gmsim
