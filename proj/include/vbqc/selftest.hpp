#pragma once

// Phase-one statistics and analytic machinery: the 14 admissible measurement
// settings, ideal correlations, running correlation estimators, the
// end-of-phase acceptance test, and the bound formulas (delta, confidence,
// chi, eps1/eps2/eps_tilde, resource scaling).

#include <array>
#include <optional>
#include <string>

#include "vbqc/state.hpp"

namespace vbqc {

enum class AliceAxis { X, Y, Z, D, EPlus, EMinus, F };
enum class BobAxis { X, Y, Z };

std::string to_string(AliceAxis a);
std::string to_string(BobAxis b);

struct MeasurementSetting {
  AliceAxis alpha;
  BobAxis beta;
  bool operator==(const MeasurementSetting&) const = default;
};

// Canonical order of the 14 admissible settings:
// XX XY XZ YY YZ ZZ DX DZ E+X E+Y E-X E-Y FY FZ.
const std::array<MeasurementSetting, 14>& all_settings();
bool is_admissible(MeasurementSetting s);
int setting_index(MeasurementSetting s);  // throws on inadmissible pairs
std::string setting_name(MeasurementSetting s);

// 2x2 observable for one side. Alice: X, Y, Z, D=(X+Z)/sqrt2,
// E+- = (+-X+Y)/sqrt2, F=(Y+Z)/sqrt2. Bob: X, Z, and Y -> -Y.
Operator<double> observable_matrix(AliceAxis axis);
Operator<double> observable_matrix(BobAxis axis);

// <phi+| alpha (x) beta |phi+> under the Bob Y = -Y convention.
double ideal_correlation(MeasurementSetting s);

// Per-setting counters and estimators. The estimator is stored as the exact
// integer sum of +-1 products over the count, read out as a real.
class CorrelationLedger {
 public:
  void record(MeasurementSetting s, int a, int b);
  long long count(MeasurementSetting s) const;
  double estimator(MeasurementSetting s) const;  // 0 while empty
  long long total_records() const;

 private:
  std::array<long long, 14> counts_{};
  std::array<long long, 14> sums_{};
};

// Value-semantics form of the running-mean update.
CorrelationLedger update_estimator(CorrelationLedger ledger, MeasurementSetting s,
                                   int a, int b);

struct SecurityParams {
  double p = 0.9;          // target confidence, in (0,1)
  double epsilon = 0.1;    // correlation tolerance, > 0
  double delta_frac = 0.25;  // verifiability constant Delta, in (0, 1/2)
  double c = 1.0;          // oversampling constant, >= 1
  int m = 1;               // prepared-qubit count
  long long n_tilde = 1;   // per-setting test count

  void validate() const;
  long long total_rounds() const;  // N = m + 14 c n_tilde
};

// delta = exp(-(n_tilde + m) eps^2 / 8).
double azuma_delta(long long n_tilde, long long m, double epsilon);

enum class ConfidenceConvention { PerSession, PerQubit };

// (1-delta)^3 (1-2 delta)^11; 0 with *degenerate set when delta >= 1/2.
double confidence(double delta, bool* degenerate = nullptr);
// (1-delta)^{3m} (1-2 delta)^{11m}, the per-qubit variant.
double confidence_per_qubit(double delta, int m, bool* degenerate = nullptr);
double confidence(double delta, int m, ConfidenceConvention convention,
                  bool* degenerate = nullptr);

// chi = (2 n_tilde eps + m (2 + eps)) / (n_tilde + m).
double chi_bound(long long n_tilde, long long m, double epsilon);

struct EpsilonBounds {
  double eps1 = 0;
  double eps2 = 0;
  double eps_tilde = 0;
};

// eps2 = sqrt(2 chi); eps1 = (1+sqrt2) sqrt((1+2 sqrt2) chi + sqrt(2 chi))
// + 2 sqrt(2 chi); eps_tilde = (9 eps1 + eps2) / 2.
EpsilonBounds epsilon_bounds(double chi);

// Worst-case hypothetical deviation for unmeasured preparation pairs, by
// ideal correlation value; `pessimistic` selects the |eps'| = 2 blanket.
double worst_case_prep_deviation(double mu, bool pessimistic = false);

struct BoundReport {
  double chi = 0;
  double eps1 = 0;
  double eps2 = 0;
  double eps_tilde = 0;
  double delta = 0;
  double confidence = 0;
  double p_error_bound = 0;
};

// Flat JSON object with the seven stable field names.
std::string to_json(const BoundReport& report);
BoundReport bound_report_from_json(const std::string& text);

struct Verdict {
  enum class Code {
    Accept,
    InsufficientConfidence,
    InsufficientStatistics,
    CorrelationDeviation,
    ProtocolViolation,
    TrapFailure,
  };
  Code code = Code::Accept;
  std::optional<MeasurementSetting> setting;
  std::string detail;

  bool accepted() const { return code == Code::Accept; }
  std::string describe() const;
};

// Accept iff confidence(delta) >= p, every setting has at least n_tilde
// records, and every estimator is within epsilon of ideal. The first failed
// condition (in that order, settings in canonical order) is reported.
Verdict acceptance_check(const CorrelationLedger& ledger, const SecurityParams& params,
                         ConfidenceConvention convention = ConfidenceConvention::PerSession);

struct ResourceEstimate {
  double epsilon = 0;      // eps0 / m^2
  long long n_tilde = 0;   // per-setting test count
  long long total_pairs = 0;  // N = m + 14 c n_tilde
  double epsilon0 = 1.0;   // implementation constant, not theory-fixed
};

// Chooses eps = eps0 m^-2 and n_tilde + m = ceil(8 eps^-2 ln(28 m / (1-p)))
// so that the session confidence meets `target_confidence`.
ResourceEstimate resource_estimate(int m, double target_confidence, double c = 1.0,
                                   double epsilon0 = 1.0);

}  // namespace vbqc
