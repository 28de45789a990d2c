#pragma once

// Verifiability bound composition: the accepted-incorrect probability bound,
// the fidelity floor for the prepared inputs, and the trace-distance bound
// derived from it.

#include "vbqc/selftest.hpp"

namespace vbqc {

// 1 - p Delta + 2 p sqrt(m) eps_tilde, clamped to [0, 1].
double p_error_bound(double confidence_p, double delta_frac, int m, double eps_tilde);
double p_error_bound(const SecurityParams& params, const BoundReport& report);

// (1 - eps_tilde^2 / 2)^{2m}; dominates 1 - m eps_tilde^2 while eps^2 <= 2.
double fidelity_floor(double eps_tilde, int m);

// 2 sqrt(m) eps_tilde.
double input_trace_bound(double eps_tilde, int m);

// Composes the full report from the security parameters alone; `ideal_chi`
// replaces the worst-case chi with 0 (perfectly prepared inputs).
BoundReport make_bound_report(const SecurityParams& params,
                              ConfidenceConvention convention =
                                  ConfidenceConvention::PerSession,
                              bool ideal_chi = false);

}  // namespace vbqc
