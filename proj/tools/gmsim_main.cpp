// Command-line front end: GMPE predictions, record analysis, stochastic
// simulation, spectrum-matched selection, archive parsing and dataset
// filtering.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "gmsim/coefficients.hpp"
#include "gmsim/envelope.hpp"
#include "gmsim/gmpe.hpp"
#include "gmsim/io_util.hpp"
#include "gmsim/s_transform.hpp"
#include "gmsim/selection.hpp"
#include "gmsim/signal_metrics.hpp"
#include "gmsim/simulator.hpp"
#include "gmsim/source_model.hpp"
#include "gmsim/strong_motion.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gmsim;

namespace {

constexpr int kSchemaVersion = 1;

json prediction_json(const Prediction& p) {
  return json{{"median", p.median()}, {"mean_ln", p.mean_ln}, {"phi", p.phi},
              {"tau", p.tau},         {"sigma", p.sigma},     {"units", p.units}};
}

json scenario_json(const Scenario& s) {
  return json{{"mw", s.mw}, {"rrup_km", s.rrup}, {"vs30_mps", s.vs30}};
}

std::string trace_csv(const TimeSeries& ts) {
  std::string out = "t_s,acc_mps2\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out += to_sig9(ts.time_at(i));
    out += ',';
    out += to_sig9(ts.samples[i]);
    out += '\n';
  }
  return out;
}

TimeSeries read_trace_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty trace");
  TimeSeries ts;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < 2) throw std::runtime_error(path + ": malformed trace row");
    const auto t = parse_double(cells[0]);
    const auto a = parse_double(cells[1]);
    if (!t || !a) throw std::runtime_error(path + ": malformed trace row");
    times.push_back(*t);
    ts.samples.push_back(*a);
  }
  if (times.size() < 2) throw std::runtime_error(path + ": trace too short");
  ts.t0 = times.front();
  ts.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  return ts;
}

struct CommonTableOpts {
  std::string sa_csv;
  std::string param_csv;
  CoefficientTable load() const { return load_coefficients(sa_csv, param_csv); }
};

void add_table_options(CLI::App* cmd, CommonTableOpts& opts) {
  cmd->add_option("--sa-table", opts.sa_csv,
                  "CSV override for the spectral coefficient table");
  cmd->add_option("--param-table", opts.param_csv,
                  "CSV override for the parameter coefficient table");
}

int cmd_predict(const Scenario& scenario, const std::string& param,
                const std::string& hdef_name, const CommonTableOpts& topts,
                const std::string& out_path) {
  const CoefficientTable table = topts.load();
  const HDef hdef = hdef_from_string(hdef_name);

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["scenario"] = scenario_json(scenario);
  const RangeCheck range = check_range(scenario);
  if (!range.ok()) {
    doc["range_warning"] = range.message();
    std::cerr << "warning: " << range.message() << "\n";
  }

  const bool all = param == "all";
  if (all || param == "sa") {
    json rows = json::array();
    for (double period : table.sa_periods()) {
      json row = prediction_json(predict_sa(table, scenario, period));
      row["period_s"] = period;
      rows.push_back(std::move(row));
    }
    doc["sa"] = std::move(rows);
  }
  if (all || param == "ai") {
    doc["ai"] = prediction_json(predict_ai(
        table, scenario, hdef == HDef::ind ? HDef::gm : hdef));
  }
  if (all || param == "dsr") {
    doc["dsr"] = prediction_json(predict_dsr(
        table, scenario, hdef == HDef::am ? HDef::gm : hdef));
  }
  if (all || param == "fc") {
    const FcParamsPrediction fc = predict_fc_params(table, scenario);
    doc["fc"] = json{{"a", prediction_json(fc.a)},
                     {"ln_b", prediction_json(fc.ln_b)},
                     {"median_b", fc.median_b()}};
  }

  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    atomic_write_file(out_path, text);
  }
  return 0;
}

int cmd_analyze(const std::vector<std::string>& files, double p_arrival_opt,
                const CommonTableOpts& topts, const std::string& out_path,
                const std::string& dump_st_prefix) {
  const CoefficientTable table = topts.load();
  const std::vector<double> periods = table.sa_periods();

  std::string csv =
      "file,samples,dt_s,pga_mps2,pga_g,ai_mps,t5_s,t95_s,dsr_s,p_arrival_s,"
      "fc_a,fc_b,fc_branch,fc_rms,fc_usable";
  for (double p : periods) {
    csv += ",sa_g_";
    csv += (p == 0.0) ? "PGA" : to_sig9(p);
  }
  csv += '\n';

  for (const auto& file : files) {
    const ParsedRecord rec = parse_strong_motion(read_file(file));
    const ScalarMetrics m = compute_scalar_metrics(rec.ts);

    csv += file;
    csv += ',';
    csv += std::to_string(rec.ts.size());
    csv += ',';
    csv += to_sig9(rec.ts.dt);
    for (double v : {m.pga, m.pga_g, m.ai, m.t5, m.t95, m.dsr}) {
      csv += ',';
      csv += to_sig9(v);
    }

    // p_arrival_s, fc_a, fc_b, fc_branch, fc_rms, fc_usable
    std::string fc_cells;
    double p_arrival = p_arrival_opt;
    try {
      if (!(p_arrival > 0.0)) p_arrival = pick_p_arrival(rec.ts);
      const SnrProfile snr = compute_snr(rec.ts, p_arrival);
      const auto freqs = stransform_freq_grid(rec.ts, 0.5 / rec.ts.dt, 2);
      const std::size_t stride = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(0.05 / rec.ts.dt)));
      const TimeFrequencyMap map = s_transform(rec.ts, freqs, stride);
      if (!dump_st_prefix.empty()) {
        write_map_csv(map, dump_st_prefix + fs::path(file).stem().string() +
                               "_st.csv");
      }
      const auto series = central_frequency_series(map, snr, p_arrival, m.t95);
      const FcFit fit = fit_fc_model(series, map);
      fc_cells = "," + to_sig9(p_arrival) + "," + to_sig9(fit.a) + "," +
                 to_sig9(fit.b) + "," + to_string(fit.branch) + "," +
                 to_sig9(fit.rms_residual) + ",yes";
    } catch (const std::exception& e) {
      std::cerr << file << ": frequency analysis skipped: " << e.what() << "\n";
      fc_cells = "," + (p_arrival > 0.0 ? to_sig9(p_arrival) : std::string()) +
                 ",,,,," + "unusable";
    }
    csv += fc_cells;

    const ResponseSpectrum rs = compute_response_spectrum(rec.ts, periods);
    for (double sa : rs.sa_g) {
      csv += ',';
      csv += to_sig9(sa);
    }
    csv += '\n';
  }

  if (out_path.empty()) {
    std::cout << csv;
  } else {
    atomic_write_file(out_path, csv);
  }
  return 0;
}

json sampled_json(const SampledParams& p) {
  return json{{"ai_mps", p.ai},
              {"dsr_s", p.dsr},
              {"fc_a", p.fc_a},
              {"fc_b", p.fc_b},
              {"stress_drop_bars", p.stress_drop_bars},
              {"q0", p.q0},
              {"n_exp", p.n_exp},
              {"sub_seed", p.sub_seed}};
}

json measured_json(const ScalarMetrics& m) {
  return json{{"pga_mps2", m.pga}, {"pga_g", m.pga_g}, {"ai_mps", m.ai},
              {"t5_s", m.t5},      {"t95_s", m.t95},   {"dsr_s", m.dsr}};
}

int cmd_simulate(const SimulationConfig& cfg, const CommonTableOpts& topts,
                 const std::string& out_dir) {
  const CoefficientTable table = topts.load();
  fs::create_directories(out_dir);

  const EnsembleResult result = simulate_ensemble(cfg, table);
  if (!result.range.ok()) {
    std::cerr << "warning: " << result.range.message() << "\n";
  }

  const std::vector<double> periods = table.sa_periods();

  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["config"] = json{
      {"scenario", scenario_json(cfg.scenario)},
      {"n_sims", cfg.n_sims},
      {"dt_s", cfg.dt},
      {"master_seed", cfg.master_seed},
      {"truncate_sigma", cfg.truncate_sigma},
      {"stress_drop_log10_bounds", {cfg.stress_drop_log10_min, cfg.stress_drop_log10_max}},
      {"q0_bounds", {cfg.q0_min, cfg.q0_max}},
      {"n_exp_bounds", {cfg.n_exp_min, cfg.n_exp_max}},
      {"beta_kms", cfg.beta_kms},
      {"spectrum_form", to_string(cfg.spectrum_form)},
      {"exact_energy_rescale", cfg.exact_energy_rescale},
      {"hdef", to_string(cfg.hdef)},
      {"shape_block_s", cfg.shape_block_s},
      {"duration_accept_rel", cfg.duration_accept_rel},
  };
  manifest["predictions"] = json{{"ai", prediction_json(result.targets.ai)},
                                 {"dsr", prediction_json(result.targets.dsr)},
                                 {"fc_a", prediction_json(result.targets.fc_a)},
                                 {"fc_ln_b", prediction_json(result.targets.fc_ln_b)}};
  if (!result.range.ok()) manifest["range_warning"] = result.range.message();

  std::string stats =
      "index,sampled_ai_mps,sampled_dsr_s,sampled_fc_a,sampled_fc_b,"
      "stress_drop_bars,q0,n_exp,measured_ai_mps,measured_dsr_s,"
      "measured_pga_g,envelope_dsr_s,duration_calibrated";
  for (double p : periods) {
    stats += ",sa_g_";
    stats += (p == 0.0) ? "PGA" : to_sig9(p);
  }
  stats += '\n';

  json sims = json::array();
  char name[32];
  for (const auto& m : result.motions) {
    std::snprintf(name, sizeof(name), "sim_%05llu.csv",
                  static_cast<unsigned long long>(m.index));
    const std::string trace_file = name;
    atomic_write_file((fs::path(out_dir) / trace_file).string(),
                      trace_csv(m.ts));
    json entry;
    entry["index"] = m.index;
    entry["trace_file"] = trace_file;
    entry["sampled"] = sampled_json(m.params);
    entry["measured"] = measured_json(m.measured);
    entry["envelope"] = json{{"achieved_dsr_s", m.envelope_dsr},
                             {"calibrated", m.duration_calibrated}};
    sims.push_back(std::move(entry));

    stats += std::to_string(m.index);
    for (double v : {m.params.ai, m.params.dsr, m.params.fc_a, m.params.fc_b,
                     m.params.stress_drop_bars, m.params.q0, m.params.n_exp,
                     m.measured.ai, m.measured.dsr, m.measured.pga_g,
                     m.envelope_dsr}) {
      stats += ',';
      stats += to_sig9(v);
    }
    stats += ',';
    stats += m.duration_calibrated ? "yes" : "no";
    const ResponseSpectrum rs = compute_response_spectrum(m.ts, periods);
    for (double sa : rs.sa_g) {
      stats += ',';
      stats += to_sig9(sa);
    }
    stats += '\n';
  }
  manifest["simulations"] = std::move(sims);

  json fails = json::array();
  for (const auto& f : result.failures) {
    fails.push_back(json{{"index", f.index}, {"error", f.error}});
    std::cerr << "simulation " << f.index << " failed: " << f.error << "\n";
  }
  manifest["failures"] = std::move(fails);

  atomic_write_file((fs::path(out_dir) / "manifest.json").string(),
                    manifest.dump(2) + "\n");
  atomic_write_file((fs::path(out_dir) / "ensemble_stats.csv").string(), stats);

  std::cout << "wrote " << result.motions.size() << " traces ("
            << result.failures.size() << " failures) to " << out_dir << "\n";
  return 0;
}

ResponseSpectrum read_target_spectrum(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty spectrum");
  const auto header = split_csv_line(line);
  std::ptrdiff_t c_p = -1, c_sa = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name == "period_s") c_p = static_cast<std::ptrdiff_t>(i);
    if (name == "sa_g") c_sa = static_cast<std::ptrdiff_t>(i);
  }
  if (c_p < 0 || c_sa < 0) {
    throw std::runtime_error(path + ": spectrum needs period_s and sa_g columns");
  }
  ResponseSpectrum rs;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const auto p = parse_double(cells[static_cast<std::size_t>(c_p)]);
    const auto sa = parse_double(cells[static_cast<std::size_t>(c_sa)]);
    if (!p || !sa) throw std::runtime_error(path + ": malformed spectrum row");
    rs.periods.push_back(*p);
    rs.sa_g.push_back(*sa);
  }
  if (rs.periods.empty()) throw std::runtime_error(path + ": empty spectrum");
  return rs;
}

int cmd_select(const std::string& manifest_path, const std::string& target_path,
               std::size_t k, const std::string& out_path) {
  const json manifest = json::parse(read_file(manifest_path));
  const fs::path base = fs::path(manifest_path).parent_path();

  std::vector<SyntheticMotion> motions;
  for (const auto& entry : manifest.at("simulations")) {
    SyntheticMotion m;
    m.index = entry.at("index").get<std::uint64_t>();
    m.ts = read_trace_csv((base / entry.at("trace_file").get<std::string>()).string());
    motions.push_back(std::move(m));
  }
  const ResponseSpectrum target = read_target_spectrum(target_path);
  const auto ranked =
      motions.empty() && k == 0
          ? std::vector<SelectionEntry>{}
          : select_best_match(motions, target, std::min(k, motions.size()));

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["ensemble"] = manifest_path;
  doc["target"] = target_path;
  doc["k"] = k;
  json sel = json::array();
  for (const auto& e : ranked) {
    char name[32];
    std::snprintf(name, sizeof(name), "sim_%05llu.csv",
                  static_cast<unsigned long long>(e.index));
    sel.push_back(json{{"index", e.index}, {"mse", e.mse}, {"trace_file", name}});
  }
  doc["selection"] = std::move(sel);

  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    atomic_write_file(out_path, text);
  }
  return 0;
}

int cmd_parse(const std::string& file, std::string out_prefix) {
  const ParsedRecord rec = parse_strong_motion(read_file(file));
  if (out_prefix.empty()) out_prefix = fs::path(file).stem().string();

  atomic_write_file(out_prefix + ".csv", trace_csv(rec.ts));

  json header;
  header["schema_version"] = kSchemaVersion;
  json fields = json::array();
  for (const auto& [k, v] : rec.file.header) {
    fields.push_back(json{{"key", k}, {"value", v}});
  }
  header["header"] = std::move(fields);
  header["sampling_hz"] = rec.file.sampling_hz;
  header["duration_s"] = rec.file.duration_s;
  header["gal_per_count"] = rec.file.gal_per_count();
  header["samples"] = rec.ts.size();
  atomic_write_file(out_prefix + ".json", header.dump(2) + "\n");

  std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".json\n";
  return 0;
}

int cmd_filter(const std::string& metadata_path, const std::string& out_path) {
  const auto rows = parse_metadata_csv(read_file(metadata_path));
  std::string csv = "record_id,accepted,rule\n";
  for (const auto& row : rows) {
    const FilterDecision d = apply_dataset_filters(row);
    csv += row.record_id;
    csv += ',';
    csv += d.accepted ? "yes" : "no";
    csv += ',';
    csv += d.rule;
    csv += '\n';
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    atomic_write_file(out_path, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rock-site ground-motion prediction and nonstationary "
               "stochastic simulation toolkit"};
  app.require_subcommand(1);

  // predict
  Scenario scenario;
  std::string param = "all", hdef_name = "GM", out_path;
  CommonTableOpts topts;
  auto* predict = app.add_subcommand("predict", "Evaluate the prediction equations");
  predict->add_option("--mw", scenario.mw, "Moment magnitude")->required();
  predict->add_option("--rrup", scenario.rrup, "Rupture distance, km")->required();
  predict->add_option("--vs30", scenario.vs30, "Site Vs30, m/s")->required();
  predict->add_option("--param", param, "sa|ai|dsr|fc|all")
      ->check(CLI::IsMember({"sa", "ai", "dsr", "fc", "all"}));
  predict->add_option("--hdef", hdef_name, "GM|AM|IND")
      ->check(CLI::IsMember({"GM", "AM", "IND"}));
  predict->add_option("--out", out_path, "Write JSON here instead of stdout");
  add_table_options(predict, topts);

  // analyze
  std::vector<std::string> analyze_files;
  double p_arrival = 0.0;
  std::string dump_st;
  auto* analyze = app.add_subcommand("analyze", "Measure metrics of records");
  analyze->add_option("files", analyze_files, "Strong-motion files")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--p-arrival", p_arrival,
                      "Override the automatic P-arrival pick, s");
  analyze->add_option("--out", out_path, "Write CSV here instead of stdout");
  analyze->add_option("--dump-st", dump_st,
                      "Prefix for time-frequency map CSV dumps");
  add_table_options(analyze, topts);

  // simulate
  SimulationConfig cfg;
  std::string out_dir = "ensemble";
  std::string spectrum_form = "as-printed";
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic ensemble");
  simulate->set_config("--config", "", "key=value file; flags override it");
  simulate->add_option("--mw", cfg.scenario.mw, "Moment magnitude")->required();
  simulate->add_option("--rrup", cfg.scenario.rrup, "Rupture distance, km")->required();
  simulate->add_option("--vs30", cfg.scenario.vs30, "Site Vs30, m/s")->required();
  simulate->add_option("--n", cfg.n_sims, "Number of simulations")->required();
  simulate->add_option("--seed", cfg.master_seed, "Master seed")->required();
  simulate->add_option("--dt", cfg.dt, "Sample interval, s");
  simulate->add_option("--truncate-sigma", cfg.truncate_sigma,
                       "Truncation of the parameter normals, sigma units");
  simulate->add_option("--stress-drop-log10-min", cfg.stress_drop_log10_min);
  simulate->add_option("--stress-drop-log10-max", cfg.stress_drop_log10_max);
  simulate->add_option("--q0-min", cfg.q0_min);
  simulate->add_option("--q0-max", cfg.q0_max);
  simulate->add_option("--n-exp-min", cfg.n_exp_min);
  simulate->add_option("--n-exp-max", cfg.n_exp_max);
  simulate->add_option("--beta", cfg.beta_kms, "Shear-wave speed, km/s");
  simulate->add_option("--spectrum-form", spectrum_form, "as-printed|brune-standard")
      ->check(CLI::IsMember({"as-printed", "brune-standard"}));
  simulate->add_flag("!--no-rescale", cfg.exact_energy_rescale,
                     "Disable the exact energy rescale");
  simulate->add_option("--shape-block", cfg.shape_block_s,
                       "Shape quantization block, s");
  simulate->add_option("--duration-accept", cfg.duration_accept_rel,
                       "Relative envelope-duration miss kept in the ensemble");
  simulate->add_option("--threads", cfg.threads, "Worker threads (0 = auto)");
  simulate->add_option("--out-dir", out_dir, "Output directory");
  add_table_options(simulate, topts);

  // select
  std::string manifest_path, target_path;
  std::size_t k = 0;
  auto* select = app.add_subcommand("select", "Rank motions against a target spectrum");
  select->add_option("--ensemble", manifest_path, "Ensemble manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  select->add_option("--target", target_path, "Target spectrum CSV")
      ->required()
      ->check(CLI::ExistingFile);
  select->add_option("--k", k, "Subset size")->required();
  select->add_option("--out", out_path, "Write JSON here instead of stdout");

  // parse
  std::string parse_file, out_prefix;
  auto* parse = app.add_subcommand("parse", "Normalize a strong-motion file");
  parse->add_option("file", parse_file, "Strong-motion file")
      ->required()
      ->check(CLI::ExistingFile);
  parse->add_option("--out-prefix", out_prefix, "Output path prefix");

  // filter
  std::string metadata_path;
  auto* filter = app.add_subcommand("filter", "Apply the dataset selection rules");
  filter->add_option("metadata", metadata_path, "Metadata CSV")
      ->required()
      ->check(CLI::ExistingFile);
  filter->add_option("--out", out_path, "Write CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*predict) return cmd_predict(scenario, param, hdef_name, topts, out_path);
    if (*analyze) return cmd_analyze(analyze_files, p_arrival, topts, out_path, dump_st);
    if (*simulate) {
      cfg.spectrum_form = spectrum_form_from_string(spectrum_form.c_str());
      return cmd_simulate(cfg, topts, out_dir);
    }
    if (*select) return cmd_select(manifest_path, target_path, k, out_path);
    if (*parse) return cmd_parse(parse_file, out_prefix);
    if (*filter) return cmd_filter(metadata_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
