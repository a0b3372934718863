#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gmsim {

/// Regression coefficients for PGA and the 5%-damped acceleration response
/// spectrum, geometric mean of the horizontal components, in g. Period 0
/// encodes PGA. Dispersions are in natural-log units.
struct SaCoefficientRow {
  double period;  // s
  double a1, a2, a3, a4;
  double mh;
  double b1, b2, b3;
  double h;   // km
  double c1;
  double phi, tau, sigma;
};

enum class Target { ai, dsr, a_coef, ln_b };
enum class HDef { gm, am, ind };

/// Coefficients for the scalar ground-motion parameters. Entries the source
/// regression did not use are absent rather than zero.
struct ParamCoefficientRow {
  Target target;
  HDef hdef;
  double a1, a2;
  std::optional<double> a3;
  double b1;
  std::optional<double> b2;
  std::optional<double> h;  // km
  double c1;
  double phi, tau, sigma;
};

struct CoefficientTable {
  std::vector<SaCoefficientRow> sa;
  std::vector<ParamCoefficientRow> params;

  /// Exact-match lookup; throws listing the tabulated periods.
  const SaCoefficientRow& sa_row(double period) const;
  const ParamCoefficientRow& param_row(Target t, HDef h) const;
  std::vector<double> sa_periods() const;
};

/// The embedded published tables (22 spectral rows, 6 parameter rows).
const CoefficientTable& default_table();

/// Replace one or both tables from CSV override files. Columns are named
/// like the published tables: period,a1,a2,a3,a4,Mh,b1,b2,b3,h,c1,phi,tau,
/// sigma for the spectral table and target,hdef,a1,a2,a3,b1,b2,h,c1,phi,
/// tau,sigma for the parameter table ("X" or an empty cell marks an absent
/// coefficient; period "PGA" is accepted for 0). Parse errors carry the row
/// and column.
CoefficientTable load_coefficients(const std::string& sa_csv_path = "",
                                   const std::string& param_csv_path = "");

CoefficientTable parse_sa_table_csv(const std::string& text,
                                    const std::string& origin = "sa-table");
std::vector<ParamCoefficientRow> parse_param_table_csv(
    const std::string& text, const std::string& origin = "param-table");

/// Canonical serialization of a table (9 significant digits), used by the
/// transcription checksum test.
std::string canonical_serialization(const CoefficientTable& t);

const char* to_string(Target t);
const char* to_string(HDef h);
Target target_from_string(const std::string& s);
HDef hdef_from_string(const std::string& s);

}  // namespace gmsim
