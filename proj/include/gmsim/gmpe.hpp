#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gmsim/coefficients.hpp"

namespace gmsim {

struct Scenario {
  double mw = 0.0;    // moment magnitude
  double rrup = 0.0;  // closest rupture distance, km
  double vs30 = 0.0;  // m/s
};

/// The regressions were derived for 4.5 <= Mw <= 6.9 and 500 <= Vs30 <= 1500
/// m/s; use outside that box is allowed but flagged.
struct RangeCheck {
  bool mw_ok = true;
  bool vs30_ok = true;
  bool ok() const { return mw_ok && vs30_ok; }
  std::string message() const;
};

RangeCheck check_range(const Scenario& s);

struct Prediction {
  double mean_ln = 0.0;  // natural log of the median
  double phi = 0.0;      // within-event std
  double tau = 0.0;      // between-event std
  double sigma = 0.0;    // total std
  std::string units;
  double median() const;
};

/// Median spectral acceleration (g) at one tabulated period; period 0 is
/// PGA. No interpolation between periods.
Prediction predict_sa(const CoefficientTable& table, const Scenario& s,
                      double period);

/// Median Arias intensity (m/s). hdef is GM or AM.
Prediction predict_ai(const CoefficientTable& table, const Scenario& s,
                      HDef hdef);

/// Median significant relative duration (s). hdef is GM or IND.
Prediction predict_dsr(const CoefficientTable& table, const Scenario& s,
                       HDef hdef);

struct FcParamsPrediction {
  Prediction a;     // dimensionless intercept
  Prediction ln_b;  // natural log of the decay slope
  double median_b() const;
};

/// Frequency-decay coefficients; rrup must be positive because the distance
/// term is ln(rrup).
FcParamsPrediction predict_fc_params(const CoefficientTable& table,
                                     const Scenario& s);

struct RecordResidual {
  std::string event_id;
  double value = 0.0;  // total residual, natural-log units
};

struct ResidualDecomposition {
  std::map<std::string, double> between_event;  // one entry per event
  std::vector<double> within_event;             // aligned with the input order
};

/// Conditional-mean split of total residuals at fixed variance components:
/// deltaB_i = tau^2 n_i rbar_i / (n_i tau^2 + phi^2), deltaW_ij = r_ij -
/// deltaB_i.
ResidualDecomposition decompose_residuals(std::span<const RecordResidual> records,
                                          double phi, double tau);

}  // namespace gmsim
