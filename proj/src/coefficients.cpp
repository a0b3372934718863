#include "gmsim/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gmsim/io_util.hpp"

namespace gmsim {

namespace {

// Rock-site spectral rows (geometric mean, g). Period 0 is PGA.
// clang-format off
const SaCoefficientRow kSaRows[] = {
  // period    a1         a2        a3         a4        Mh    b1        b2        b3       h     c1         phi      tau      sigma
  {0.0,     -0.053447, 0.51153, -0.13258,   0.22396,  5.6, -0.96551, 0.2107,   -0.014,  1.36, -0.33707,  0.65541, 0.53346, 0.84507},
  {0.0384,   0.66897,  0.58703, -0.20807,   0.39223,  5.6, -1.0025,  0.16005,  -0.014,  1.2,  -0.062352, 0.67452, 0.5656,  0.88027},
  {0.0484,   0.91612,  0.64692, -0.22739,   0.49764,  5.6, -0.98952, 0.13093,  -0.014,  1.2,  -0.053157, 0.69009, 0.57479, 0.89811},
  {0.0582,   1.0402,   0.86293, -0.15531,   0.67188,  5.6, -0.931,   0.08792,  -0.014,  1.2,  -0.063994, 0.70965, 0.57829, 0.91543},
  {0.0769,   1.174,    1.1741,  -0.040642,  0.82768,  5.6, -0.85675, 0.049073, -0.014,  1.2,  -0.060246, 0.75727, 0.57423, 0.95037},
  {0.0844,   1.1251,   1.1062,  -0.077909,  0.79292,  5.6, -0.85304, 0.05869,  -0.014,  1.2,  -0.15693,  0.76705, 0.56967, 0.95545},
  {0.097,    1.049,    1.1029,  -0.097397,  0.83191,  5.6, -0.84279, 0.060533, -0.014,  1.2,  -0.30829,  0.76035, 0.56389, 0.94663},
  {0.1167,   0.95244,  1.1226,  -0.033774,  0.72045,  5.6, -0.86795, 0.090565, -0.0138, 1.2,  -0.45209,  0.73082, 0.54812, 0.91353},
  {0.1472,   0.9456,   0.98923, -0.056821,  0.55631,  5.6, -0.957,   0.1353,   -0.0131, 1.2,  -0.63621,  0.73475, 0.53237, 0.90735},
  {0.1691,   0.83211,  0.6902,  -0.21985,   0.3962,   5.6, -1.0205,  0.18065,  -0.0126, 1.2,  -0.70706,  0.72299, 0.52852, 0.89557},
  {0.2036,   0.64394,  0.4867,  -0.29401,   0.25966,  5.6, -1.0727,  0.21946,  -0.0119, 1.2,  -0.76095,  0.71194, 0.52347, 0.88367},
  {0.234,    0.47552,  0.55449, -0.30051,   0.33502,  5.6, -1.0613,  0.20849,  -0.0113, 1.2,  -0.79769,  0.70218, 0.50345, 0.86402},
  {0.309,    0.21697,  0.40545, -0.32381,   0.21518,  5.6, -1.1407,  0.25011,  -0.01,   1.2,  -0.78078,  0.67721, 0.51352, 0.84989},
  {0.3551,   0.26779,  0.54112, -0.12721,  -0.05996,  5.8, -1.1953,  0.27496,  -0.0092, 1.2,  -0.8036,   0.67557, 0.51987, 0.85244},
  {0.3896,   0.23289,  0.37994, -0.17941,  -0.17986,  6.0, -1.2195,  0.28412,  -0.0087, 1.2,  -0.79823,  0.67672, 0.52827, 0.8585},
  {0.4274,   0.15474,  0.39176, -0.15983,  -0.23609,  6.0, -1.2479,  0.29566,  -0.0082, 1.2,  -0.78573,  0.67768, 0.52833, 0.85929},
  {0.469,    0.16342,  0.50356, -0.1262,   -0.19146,  6.0, -1.27,    0.289,    -0.0076, 1.2,  -0.75421,  0.67615, 0.53119, 0.85985},
  {0.5913,   0.004647, 0.53229, -0.11926,  -0.20505,  6.0, -1.3329,  0.3007,   -0.0062, 1.2,  -0.69754,  0.67022, 0.54423, 0.86336},
  {0.7456,  -0.15406,  0.72525, -0.03463,  -0.21427,  6.0, -1.3808,  0.30522,  -0.0049, 1.2,  -0.69847,  0.65969, 0.51299, 0.83568},
  {0.818,   -0.16584,  0.75843, -0.025508, -0.23741,  6.0, -1.4197,  0.31173,  -0.0043, 1.2,  -0.6784,   0.65957, 0.50082, 0.82816},
  {0.9401,  -0.28915,  0.79785, -0.042921, -0.20283,  6.0, -1.4363,  0.30944,  -0.0036, 1.2,  -0.65954,  0.66032, 0.47773, 0.81501},
  {1.3622,  -0.80171,  0.71254, -0.048238, -0.13681,  6.0, -1.5357,  0.34884,  -0.002,  1.2,  -0.66515,  0.64908, 0.41846, 0.77228},
};
// clang-format on

constexpr std::optional<double> kAbsent = std::nullopt;

const ParamCoefficientRow kParamRows[] = {
    // Arias intensity, m/s
    {Target::ai, HDef::am, 7.90495, 3.8684, -0.15884, -3.04157, -0.24657,
     15.815, -0.71102, 1.17046, 0.98146, 1.5275},
    {Target::ai, HDef::gm, 7.92892, 3.88485, -0.15950, -3.04614, -0.24972,
     16.131, -0.71189, 1.16603, 0.98209, 1.5245},
    // Significant relative duration, s
    {Target::dsr, HDef::ind, 0.36220, 0.34394, kAbsent, 0.63582, -0.038941,
     2.5, -0.10385, 0.43360, 0.19766, 0.4765},
    {Target::dsr, HDef::gm, 0.37827, 0.33056, kAbsent, 0.62982, -0.036646,
     2.5, -0.10080, 0.42182, 0.17488, 0.4566},
    // Frequency-decay model intercept and log-slope
    {Target::a_coef, HDef::gm, 3.55833, -0.043563, kAbsent, -0.17115, kAbsent,
     kAbsent, 0.13792, 0.33288, 0.088269, 0.34439},
    {Target::ln_b, HDef::gm, -1.01196, 0.14835, kAbsent, -0.24392, kAbsent,
     kAbsent, -0.40941, 0.97950, 0.27920, 1.01852},
};

}  // namespace

const SaCoefficientRow& CoefficientTable::sa_row(double period) const {
  for (const auto& row : sa) {
    if (std::abs(row.period - period) <= 1e-9 * std::max(1.0, period)) {
      return row;
    }
  }
  std::ostringstream msg;
  msg << "untabulated period " << period << " s; available:";
  for (const auto& row : sa) msg << ' ' << row.period;
  throw std::invalid_argument(msg.str());
}

const ParamCoefficientRow& CoefficientTable::param_row(Target t, HDef h) const {
  for (const auto& row : params) {
    if (row.target == t && row.hdef == h) return row;
  }
  throw std::invalid_argument(std::string("no coefficient row for ") +
                              to_string(t) + "/" + to_string(h));
}

std::vector<double> CoefficientTable::sa_periods() const {
  std::vector<double> out;
  out.reserve(sa.size());
  for (const auto& row : sa) out.push_back(row.period);
  return out;
}

const CoefficientTable& default_table() {
  static const CoefficientTable table = [] {
    CoefficientTable t;
    t.sa.assign(std::begin(kSaRows), std::end(kSaRows));
    t.params.assign(std::begin(kParamRows), std::end(kParamRows));
    return t;
  }();
  return table;
}

namespace {

[[noreturn]] void cell_error(const std::string& origin, std::size_t row,
                             std::size_t col, const std::string& what) {
  std::ostringstream msg;
  msg << origin << ": row " << row << ", column " << col << ": " << what;
  throw std::runtime_error(msg.str());
}

double require_number(const std::string& origin, std::size_t row,
                      std::size_t col, const std::string& cell) {
  auto v = parse_double(cell);
  if (!v) cell_error(origin, row, col, "expected a number, got '" + cell + "'");
  return *v;
}

std::optional<double> optional_number(const std::string& origin,
                                      std::size_t row, std::size_t col,
                                      const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty() || t == "X" || t == "x") return std::nullopt;
  return require_number(origin, row, col, cell);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

std::size_t column_index(const std::string& origin,
                         const std::vector<std::string>& header,
                         const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  cell_error(origin, 0, 0, "missing column '" + name + "'");
}

}  // namespace

CoefficientTable parse_sa_table_csv(const std::string& text,
                                    const std::string& origin) {
  const auto rows = csv_rows(text);
  if (rows.empty()) throw std::runtime_error(origin + ": empty table");
  const auto& header = rows[0];
  const char* names[] = {"period", "a1", "a2", "a3", "a4", "Mh", "b1",
                         "b2",     "b3", "h",  "c1", "phi", "tau", "sigma"};
  std::size_t idx[14];
  for (std::size_t i = 0; i < 14; ++i) idx[i] = column_index(origin, header, names[i]);

  CoefficientTable t;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    auto cell = [&](std::size_t c) -> const std::string& {
      if (idx[c] >= cells.size()) cell_error(origin, r, idx[c], "missing cell");
      return cells[idx[c]];
    };
    SaCoefficientRow row{};
    const std::string p = trim(cell(0));
    row.period = (p == "PGA" || p == "pga") ? 0.0 : require_number(origin, r, idx[0], p);
    row.a1 = require_number(origin, r, idx[1], cell(1));
    row.a2 = require_number(origin, r, idx[2], cell(2));
    row.a3 = require_number(origin, r, idx[3], cell(3));
    row.a4 = require_number(origin, r, idx[4], cell(4));
    row.mh = require_number(origin, r, idx[5], cell(5));
    row.b1 = require_number(origin, r, idx[6], cell(6));
    row.b2 = require_number(origin, r, idx[7], cell(7));
    row.b3 = require_number(origin, r, idx[8], cell(8));
    row.h = require_number(origin, r, idx[9], cell(9));
    row.c1 = require_number(origin, r, idx[10], cell(10));
    row.phi = require_number(origin, r, idx[11], cell(11));
    row.tau = require_number(origin, r, idx[12], cell(12));
    row.sigma = require_number(origin, r, idx[13], cell(13));
    t.sa.push_back(row);
  }
  std::sort(t.sa.begin(), t.sa.end(),
            [](const auto& a, const auto& b) { return a.period < b.period; });
  t.params.assign(std::begin(kParamRows), std::end(kParamRows));
  return t;
}

std::vector<ParamCoefficientRow> parse_param_table_csv(
    const std::string& text, const std::string& origin) {
  const auto rows = csv_rows(text);
  if (rows.empty()) throw std::runtime_error(origin + ": empty table");
  const auto& header = rows[0];
  const char* names[] = {"target", "hdef", "a1", "a2", "a3", "b1",
                         "b2",     "h",    "c1", "phi", "tau", "sigma"};
  std::size_t idx[12];
  for (std::size_t i = 0; i < 12; ++i) idx[i] = column_index(origin, header, names[i]);

  std::vector<ParamCoefficientRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    auto cell = [&](std::size_t c) -> const std::string& {
      if (idx[c] >= cells.size()) cell_error(origin, r, idx[c], "missing cell");
      return cells[idx[c]];
    };
    ParamCoefficientRow row{};
    try {
      row.target = target_from_string(trim(cell(0)));
      row.hdef = hdef_from_string(trim(cell(1)));
    } catch (const std::exception& e) {
      cell_error(origin, r, idx[0], e.what());
    }
    row.a1 = require_number(origin, r, idx[2], cell(2));
    row.a2 = require_number(origin, r, idx[3], cell(3));
    row.a3 = optional_number(origin, r, idx[4], cell(4));
    row.b1 = require_number(origin, r, idx[5], cell(5));
    row.b2 = optional_number(origin, r, idx[6], cell(6));
    row.h = optional_number(origin, r, idx[7], cell(7));
    row.c1 = require_number(origin, r, idx[8], cell(8));
    row.phi = require_number(origin, r, idx[9], cell(9));
    row.tau = require_number(origin, r, idx[10], cell(10));
    row.sigma = require_number(origin, r, idx[11], cell(11));
    out.push_back(row);
  }
  return out;
}

CoefficientTable load_coefficients(const std::string& sa_csv_path,
                                   const std::string& param_csv_path) {
  CoefficientTable t = default_table();
  if (!sa_csv_path.empty()) {
    t.sa = parse_sa_table_csv(read_file(sa_csv_path), sa_csv_path).sa;
  }
  if (!param_csv_path.empty()) {
    t.params = parse_param_table_csv(read_file(param_csv_path), param_csv_path);
  }
  return t;
}

std::string canonical_serialization(const CoefficientTable& t) {
  std::string s;
  for (const auto& r : t.sa) {
    for (double v : {r.period, r.a1, r.a2, r.a3, r.a4, r.mh, r.b1, r.b2, r.b3,
                     r.h, r.c1, r.phi, r.tau, r.sigma}) {
      s += to_sig9(v);
      s += ',';
    }
    s += '\n';
  }
  for (const auto& r : t.params) {
    s += to_string(r.target);
    s += ',';
    s += to_string(r.hdef);
    s += ',';
    auto emit = [&s](const std::optional<double>& v) {
      s += v ? to_sig9(*v) : "X";
      s += ',';
    };
    emit(r.a1);
    emit(r.a2);
    emit(r.a3);
    emit(r.b1);
    emit(r.b2);
    emit(r.h);
    emit(r.c1);
    emit(r.phi);
    emit(r.tau);
    emit(r.sigma);
    s += '\n';
  }
  return s;
}

const char* to_string(Target t) {
  switch (t) {
    case Target::ai: return "AI";
    case Target::dsr: return "SMD";
    case Target::a_coef: return "A";
    case Target::ln_b: return "B";
  }
  return "?";
}

const char* to_string(HDef h) {
  switch (h) {
    case HDef::gm: return "GM";
    case HDef::am: return "AM";
    case HDef::ind: return "IND";
  }
  return "?";
}

Target target_from_string(const std::string& s) {
  if (s == "AI") return Target::ai;
  if (s == "SMD" || s == "DSR") return Target::dsr;
  if (s == "A") return Target::a_coef;
  if (s == "B") return Target::ln_b;
  throw std::invalid_argument("unknown target '" + s + "'");
}

HDef hdef_from_string(const std::string& s) {
  if (s == "GM") return HDef::gm;
  if (s == "AM") return HDef::am;
  if (s == "IND") return HDef::ind;
  throw std::invalid_argument("unknown horizontal definition '" + s + "'");
}

}  // namespace gmsim
