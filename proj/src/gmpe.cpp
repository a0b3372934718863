#include "gmsim/gmpe.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gmsim {

RangeCheck check_range(const Scenario& s) {
  RangeCheck c;
  c.mw_ok = (s.mw >= 4.5 && s.mw <= 6.9);
  c.vs30_ok = (s.vs30 >= 500.0 && s.vs30 <= 1500.0);
  return c;
}

std::string RangeCheck::message() const {
  if (ok()) return {};
  std::string msg = "scenario outside the calibrated range:";
  if (!mw_ok) msg += " Mw not in [4.5, 6.9];";
  if (!vs30_ok) msg += " Vs30 not in [500, 1500] m/s;";
  msg += " prediction extrapolated";
  return msg;
}

double Prediction::median() const { return std::exp(mean_ln); }

namespace {

double effective_distance(double rrup, double h) {
  return std::sqrt(rrup * rrup + h * h);
}

Prediction make_prediction(double mean_ln, double phi, double tau, double sigma,
                           const char* units) {
  Prediction p;
  p.mean_ln = mean_ln;
  p.phi = phi;
  p.tau = tau;
  p.sigma = sigma;
  p.units = units;
  return p;
}

}  // namespace

Prediction predict_sa(const CoefficientTable& table, const Scenario& s,
                      double period) {
  const SaCoefficientRow& r = table.sa_row(period);
  const double dm = s.mw - r.mh;
  const double mag_term =
      (s.mw <= r.mh) ? r.a1 + r.a2 * dm + r.a3 * dm * dm : r.a1 + r.a4 * dm;
  const double reff = effective_distance(s.rrup, r.h);
  const double mean_ln = mag_term +
                         (r.b1 + r.b2 * (s.mw - 4.5)) * std::log(reff) +
                         r.b3 * reff + r.c1 * std::log(s.vs30 / 800.0);
  return make_prediction(mean_ln, r.phi, r.tau, r.sigma, "g");
}

Prediction predict_ai(const CoefficientTable& table, const Scenario& s,
                      HDef hdef) {
  if (hdef != HDef::gm && hdef != HDef::am) {
    throw std::invalid_argument("predict_ai: hdef must be GM or AM");
  }
  const ParamCoefficientRow& r = table.param_row(Target::ai, hdef);
  const double dm = s.mw - 5.6;
  const double reff = effective_distance(s.rrup, r.h.value());
  const double mean_ln = r.a1 + r.a2 * dm + r.a3.value() * dm * dm +
                         (r.b1 + r.b2.value() * (s.mw - 4.5)) * std::log(reff) +
                         r.c1 * std::log(s.vs30 / 800.0);
  return make_prediction(mean_ln, r.phi, r.tau, r.sigma, "m/s");
}

Prediction predict_dsr(const CoefficientTable& table, const Scenario& s,
                       HDef hdef) {
  if (hdef != HDef::gm && hdef != HDef::ind) {
    throw std::invalid_argument("predict_dsr: hdef must be GM or IND");
  }
  const ParamCoefficientRow& r = table.param_row(Target::dsr, hdef);
  const double reff = effective_distance(s.rrup, r.h.value());
  const double mean_ln = r.a1 + r.a2 * (s.mw - 5.6) +
                         (r.b1 + r.b2.value() * (s.mw - 4.5)) * std::log(reff) +
                         r.c1 * std::log(s.vs30 / 800.0);
  return make_prediction(mean_ln, r.phi, r.tau, r.sigma, "s");
}

FcParamsPrediction predict_fc_params(const CoefficientTable& table,
                                     const Scenario& s) {
  if (!(s.rrup > 0.0)) {
    throw std::invalid_argument(
        "predict_fc_params: rrup must be positive (the distance term is "
        "ln(rrup))");
  }
  auto eval = [&](Target target, const char* units) {
    const ParamCoefficientRow& r = table.param_row(target, HDef::gm);
    const double mean_ln = r.a1 + r.a2 * (s.mw - 5.6) +
                           r.b1 * std::log(s.rrup) +
                           r.c1 * std::log(s.vs30 / 800.0);
    return make_prediction(mean_ln, r.phi, r.tau, r.sigma, units);
  };
  FcParamsPrediction out;
  out.a = eval(Target::a_coef, "-");
  out.ln_b = eval(Target::ln_b, "-");
  return out;
}

double FcParamsPrediction::median_b() const { return std::exp(ln_b.mean_ln); }

ResidualDecomposition decompose_residuals(std::span<const RecordResidual> records,
                                          double phi, double tau) {
  if (!(phi > 0.0) || !(tau >= 0.0)) {
    throw std::invalid_argument("decompose_residuals: need phi > 0, tau >= 0");
  }
  if (records.empty()) {
    throw std::invalid_argument("decompose_residuals: empty record set");
  }
  struct Group {
    double sum = 0.0;
    double n = 0.0;
  };
  std::map<std::string, Group> groups;
  for (const auto& rec : records) {
    auto& g = groups[rec.event_id];
    g.sum += rec.value;
    g.n += 1.0;
  }
  ResidualDecomposition out;
  const double tau2 = tau * tau;
  const double phi2 = phi * phi;
  for (const auto& [event, g] : groups) {
    const double mean = g.sum / g.n;
    out.between_event[event] = tau2 * g.n * mean / (g.n * tau2 + phi2);
  }
  out.within_event.reserve(records.size());
  for (const auto& rec : records) {
    out.within_event.push_back(rec.value - out.between_event[rec.event_id]);
  }
  return out;
}

}  // namespace gmsim
