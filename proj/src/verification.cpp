#include "vbqc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vbqc {

double p_error_bound(double confidence_p, double delta_frac, int m, double eps_tilde) {
  if (confidence_p < 0.0 || confidence_p > 1.0)
    throw std::invalid_argument("confidence must be in [0,1]");
  if (!(delta_frac > 0.0 && delta_frac < 0.5))
    throw std::invalid_argument("delta_frac must be in (0, 1/2)");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (eps_tilde < 0.0) throw std::invalid_argument("eps_tilde must be non-negative");
  const double raw = 1.0 - confidence_p * delta_frac +
                     2.0 * confidence_p * std::sqrt(static_cast<double>(m)) * eps_tilde;
  return std::clamp(raw, 0.0, 1.0);
}

double p_error_bound(const SecurityParams& params, const BoundReport& report) {
  return p_error_bound(report.confidence, params.delta_frac, params.m, report.eps_tilde);
}

double fidelity_floor(double eps_tilde, int m) {
  if (eps_tilde < 0.0) throw std::invalid_argument("eps_tilde must be non-negative");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  return std::pow(1.0 - 0.5 * eps_tilde * eps_tilde, 2.0 * m);
}

double input_trace_bound(double eps_tilde, int m) {
  if (eps_tilde < 0.0) throw std::invalid_argument("eps_tilde must be non-negative");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  return 2.0 * std::sqrt(static_cast<double>(m)) * eps_tilde;
}

BoundReport make_bound_report(const SecurityParams& params,
                              ConfidenceConvention convention, bool ideal_chi) {
  params.validate();
  BoundReport report;
  report.delta = azuma_delta(params.n_tilde, params.m, params.epsilon);
  report.confidence = confidence(report.delta, params.m, convention);
  report.chi = ideal_chi ? 0.0 : chi_bound(params.n_tilde, params.m, params.epsilon);
  const auto eps = epsilon_bounds(report.chi);
  report.eps1 = eps.eps1;
  report.eps2 = eps.eps2;
  report.eps_tilde = eps.eps_tilde;
  report.p_error_bound =
      p_error_bound(report.confidence, params.delta_frac, params.m, report.eps_tilde);
  return report;
}

}  // namespace vbqc
