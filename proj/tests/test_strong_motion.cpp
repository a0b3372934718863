#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "gmsim/io_util.hpp"
#include "gmsim/s_transform.hpp"
#include "gmsim/signal_metrics.hpp"
#include "gmsim/strong_motion.hpp"

using namespace gmsim;

namespace {
std::string fixture(const std::string& name) {
  return read_file(std::string(GMSIM_FIXTURE_DIR) + "/" + name);
}
}  // namespace

TEST_CASE("100 Hz header yields a 0.01 s step") {
  const ParsedRecord rec = parse_strong_motion(fixture("fixture_event.knt"));
  CHECK(rec.ts.dt == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rec.file.sampling_hz == 100.0);
  CHECK(rec.file.counts.size() == 2000);
  CHECK(rec.ts.samples.size() == 2000);
  CHECK(*rec.file.find("STATION CODE") == "NIG019");
}

TEST_CASE("unit scale converts counts to hundredths of m/s^2") {
  const ParsedRecord rec = parse_strong_motion(fixture("fixture_unit.knt"));
  const auto raw = counts_to_mps2(rec.file);
  CHECK(raw[0] == 0.0);
  CHECK(raw[1] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(raw[2] == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("pre-event mean of the first second is removed") {
  // Shift every count by a constant; the parsed trace must be unchanged
  // because the first second sets the baseline.
  const std::string text = fixture("fixture_unit.knt");
  ParsedRecord rec = parse_strong_motion(text);
  StrongMotionFile shifted = rec.file;
  for (long& c : shifted.counts) c += 700;
  const ParsedRecord rec2 = parse_strong_motion(write_strong_motion(shifted));
  REQUIRE(rec2.ts.samples.size() == rec.ts.samples.size());
  for (std::size_t i = 0; i < rec.ts.samples.size(); ++i) {
    CHECK(rec2.ts.samples[i] == doctest::Approx(rec.ts.samples[i]).epsilon(1e-12));
  }
}

TEST_CASE("alias header spellings are canonicalized") {
  const ParsedRecord rec = parse_strong_motion(fixture("fixture_alias.knt"));
  CHECK(rec.file.sampling_hz == 200.0);
  CHECK(rec.ts.dt == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(*rec.file.find("DIR.") == "E-W");
  CHECK(*rec.file.find("STATION CODE") == "KGS005");
  CHECK(*rec.file.find("MAG.") == "6.1");
}

TEST_CASE("round trip reproduces the samples exactly") {
  for (const char* name :
       {"fixture_event.knt", "fixture_alias.knt", "fixture_unit.knt"}) {
    const ParsedRecord a = parse_strong_motion(fixture(name));
    const ParsedRecord b = parse_strong_motion(write_strong_motion(a.file));
    CHECK(a.file.counts == b.file.counts);
    REQUIRE(a.ts.samples.size() == b.ts.samples.size());
    for (std::size_t i = 0; i < a.ts.samples.size(); ++i) {
      CHECK(a.ts.samples[i] == b.ts.samples[i]);
    }
  }
}

TEST_CASE("missing mandatory keys are fatal") {
  std::string text = fixture("fixture_unit.knt");
  const auto pos = text.find("SCALE FACTOR");
  REQUIRE(pos != std::string::npos);
  const auto eol = text.find('\n', pos);
  text.erase(pos, eol - pos + 1);
  CHECK_THROWS_WITH_AS(parse_strong_motion(text),
                       doctest::Contains("SCALE FACTOR"), std::runtime_error);
}

TEST_CASE("bad sample tokens carry the line number") {
  std::string text = fixture("fixture_unit.knt");
  text += "      12      bad\n";
  CHECK_THROWS_WITH_AS(parse_strong_motion(text), doctest::Contains("line"),
                       std::runtime_error);
}

TEST_CASE("malformed scale factors are rejected") {
  std::string text = fixture("fixture_unit.knt");
  const auto pos = text.find("1(gal)/1");
  std::string broken = text;
  broken.replace(pos, 8, "1 per 1 ");
  CHECK_THROWS_WITH_AS(parse_strong_motion(broken),
                       doctest::Contains("scale factor"), std::runtime_error);
}

TEST_CASE("sample count must match the header duration") {
  const ParsedRecord rec = parse_strong_motion(fixture("fixture_unit.knt"));
  StrongMotionFile cut = rec.file;
  cut.counts.resize(cut.counts.size() - 40);
  CHECK_THROWS_WITH_AS(parse_strong_motion(write_strong_motion(cut)),
                       doctest::Contains("duration"), std::runtime_error);
}

TEST_CASE("p arrival on the event fixture lands near the onset") {
  const ParsedRecord rec = parse_strong_motion(fixture("fixture_event.knt"));
  const double pick = pick_p_arrival(rec.ts);
  CHECK(pick == doctest::Approx(3.0).epsilon(0.2));  // burst scripted at 3 s
}

namespace {

// Independent spectral-ratio recomputation: plain quadratic-cost DFT, its
// own smoothing loop, its own interpolation. Shares only the definitions.
std::vector<double> oracle_snr(const TimeSeries& ts, double p_arrival,
                               const std::vector<double>& out_freqs) {
  auto spectrum = [&](std::size_t first, std::size_t count,
                      std::vector<double>& freqs, std::vector<double>& amp) {
    std::size_t nfft = 1;
    while (nfft < count) nfft <<= 1;
    const double df = 1.0 / (nfft * ts.dt);
    std::vector<double> raw(nfft / 2);
    freqs.resize(nfft / 2);
    for (std::size_t k = 1; k <= nfft / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t n = 0; n < count; ++n) {
        const double ang = -2.0 * M_PI * static_cast<double>(k) *
                           static_cast<double>(n) / static_cast<double>(nfft);
        re += ts.samples[first + n] * std::cos(ang);
        im += ts.samples[first + n] * std::sin(ang);
      }
      raw[k - 1] = std::sqrt(re * re + im * im) * ts.dt;
      freqs[k - 1] = df * static_cast<double>(k);
    }
    amp.resize(raw.size());
    const double half = std::pow(10.0, 0.05);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      double sum = 0.0;
      int cnt = 0;
      for (std::size_t j = 0; j < raw.size(); ++j) {
        if (freqs[j] >= freqs[i] / half && freqs[j] <= freqs[i] * half) {
          sum += raw[j];
          ++cnt;
        }
      }
      amp[i] = sum / cnt;
    }
  };

  const auto n_noise = static_cast<std::size_t>(std::llround(1.0 / ts.dt));
  const auto i_p = static_cast<std::size_t>(std::llround((p_arrival - ts.t0) / ts.dt));
  std::vector<double> nf, na, sf, sa;
  spectrum(i_p - n_noise, n_noise, nf, na);
  spectrum(i_p, ts.size() - i_p, sf, sa);
  const double tn = n_noise * ts.dt;
  const double tsig = (ts.size() - i_p) * ts.dt;

  std::vector<double> out(out_freqs.size());
  for (std::size_t i = 0; i < out_freqs.size(); ++i) {
    const double f = out_freqs[i];
    // linear interpolation of the smoothed noise amplitude
    double nv;
    if (f <= nf.front()) {
      nv = na.front();
    } else if (f >= nf.back()) {
      nv = na.back();
    } else {
      std::size_t j = 1;
      while (nf[j] < f) ++j;
      const double w = (f - nf[j - 1]) / (nf[j] - nf[j - 1]);
      nv = na[j - 1] + w * (na[j] - na[j - 1]);
    }
    out[i] = (sa[i] / std::sqrt(tsig)) / (nv / std::sqrt(tn));
  }
  return out;
}

}  // namespace

TEST_CASE("snr of the event fixture matches an independent recomputation") {
  const ParsedRecord rec = parse_strong_motion(fixture("fixture_event.knt"));
  const double p = 3.0;
  const SnrProfile prof = compute_snr(rec.ts, p);
  const std::vector<double> oracle = oracle_snr(rec.ts, p, prof.freqs);

  REQUIRE(prof.snr.size() == oracle.size());
  int admitted = 0, admitted_oracle = 0, disagree = 0;
  for (std::size_t i = 0; i < prof.snr.size(); ++i) {
    CHECK(prof.snr[i] == doctest::Approx(oracle[i]).epsilon(1e-6));
    if (prof.snr[i] > 3.0) ++admitted;
    if (oracle[i] > 3.0) ++admitted_oracle;
    if ((prof.snr[i] > 3.0) != (oracle[i] > 3.0)) ++disagree;
  }
  CHECK(disagree == 0);
  CHECK(admitted == admitted_oracle);
  // The scripted bursts put signal energy at 3.5-9 Hz well above the noise.
  CHECK(admitted > 10);
  CHECK(snr_at(prof, 3.5) > 3.0);
  CHECK(snr_at(prof, 6.5) > 3.0);
}

TEST_CASE("dataset filters fire in their stated order") {
  RecordMetadata base;
  base.record_id = "r";
  base.mw = 5.0;
  base.depth_km = 10.0;
  base.dist_km = 30.0;
  base.vs30 = 600.0;
  base.pga_gal = 3.0;
  base.network = "K-NET";

  CHECK(apply_dataset_filters(base).accepted);

  RecordMetadata m = base;
  m.mw = 4.4;
  auto d = apply_dataset_filters(m);
  CHECK_FALSE(d.accepted);
  CHECK(d.rule == "magnitude");

  m = base;
  m.vs30 = 450.0;
  d = apply_dataset_filters(m);
  CHECK_FALSE(d.accepted);
  CHECK(d.rule == "vs30");

  m = base;
  m.depth_km = 26.0;
  d = apply_dataset_filters(m);
  CHECK_FALSE(d.accepted);
  CHECK(d.rule == "depth");

  m = base;
  m.pga_gal = 2.0;
  d = apply_dataset_filters(m);
  CHECK_FALSE(d.accepted);
  CHECK(d.rule == "pga");

  // the first failing rule wins
  m = base;
  m.mw = 4.0;
  m.vs30 = 100.0;
  d = apply_dataset_filters(m);
  CHECK(d.rule == "magnitude");

  m = base;
  m.vs30.reset();
  d = apply_dataset_filters(m);
  CHECK(d.rule == "incomplete-metadata");
}

TEST_CASE("external magnitude-distance predicate is honored") {
  RecordMetadata m;
  m.record_id = "far";
  m.mw = 5.0;
  m.depth_km = 10.0;
  m.dist_km = 250.0;
  m.vs30 = 600.0;
  m.pga_gal = 3.0;
  const MagnitudeDistancePredicate cut = [](double mw, double dist) {
    return dist <= 100.0 * (mw - 3.0);
  };
  const auto d = apply_dataset_filters(m, cut);
  CHECK_FALSE(d.accepted);
  CHECK(d.rule == "magnitude-distance");
}

TEST_CASE("measured metrics can replace the metadata PGA") {
  RecordMetadata m;
  m.record_id = "x";
  m.mw = 5.0;
  m.depth_km = 10.0;
  m.vs30 = 600.0;
  m.pga_gal = 100.0;  // metadata says strong
  ScalarMetrics weak{};
  weak.pga = 0.01;  // 1 gal measured
  const auto d = apply_dataset_filters(m, weak);
  CHECK_FALSE(d.accepted);
  CHECK(d.rule == "pga");
}

TEST_CASE("metadata csv parses blanks as missing") {
  const std::string csv =
      "record_id,mw,depth_km,dist_km,dist_type,vs30,network,pga_gal\n"
      "a,5.1,12,30,rrup,700,K-NET,4.2\n"
      "b,,12,30,rhyp,700,KiK-net,4.2\n";
  const auto rows = parse_metadata_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mw.value() == 5.1);
  CHECK(rows[0].dist_type == "rrup");
  CHECK_FALSE(rows[1].mw.has_value());
  CHECK(apply_dataset_filters(rows[1]).rule == "incomplete-metadata");
}
