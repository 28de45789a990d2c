#include "vbqc/selftest.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vbqc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Operator<double> scaled_sum(const Operator<double>& a, const Operator<double>& b) {
  return Operator<double>(kInvSqrt2 * (a.entries() + b.entries()));
}

}  // namespace

std::string to_string(AliceAxis a) {
  switch (a) {
    case AliceAxis::X: return "X";
    case AliceAxis::Y: return "Y";
    case AliceAxis::Z: return "Z";
    case AliceAxis::D: return "D";
    case AliceAxis::EPlus: return "E+";
    case AliceAxis::EMinus: return "E-";
    case AliceAxis::F: return "F";
  }
  throw std::invalid_argument("bad AliceAxis");
}

std::string to_string(BobAxis b) {
  switch (b) {
    case BobAxis::X: return "X";
    case BobAxis::Y: return "Y";
    case BobAxis::Z: return "Z";
  }
  throw std::invalid_argument("bad BobAxis");
}

const std::array<MeasurementSetting, 14>& all_settings() {
  static const std::array<MeasurementSetting, 14> kSettings = {{
      {AliceAxis::X, BobAxis::X},
      {AliceAxis::X, BobAxis::Y},
      {AliceAxis::X, BobAxis::Z},
      {AliceAxis::Y, BobAxis::Y},
      {AliceAxis::Y, BobAxis::Z},
      {AliceAxis::Z, BobAxis::Z},
      {AliceAxis::D, BobAxis::X},
      {AliceAxis::D, BobAxis::Z},
      {AliceAxis::EPlus, BobAxis::X},
      {AliceAxis::EPlus, BobAxis::Y},
      {AliceAxis::EMinus, BobAxis::X},
      {AliceAxis::EMinus, BobAxis::Y},
      {AliceAxis::F, BobAxis::Y},
      {AliceAxis::F, BobAxis::Z},
  }};
  return kSettings;
}

bool is_admissible(MeasurementSetting s) {
  for (const auto& t : all_settings())
    if (t == s) return true;
  return false;
}

int setting_index(MeasurementSetting s) {
  const auto& settings = all_settings();
  for (std::size_t i = 0; i < settings.size(); ++i)
    if (settings[i] == s) return static_cast<int>(i);
  throw std::invalid_argument("inadmissible measurement setting " + setting_name(s));
}

std::string setting_name(MeasurementSetting s) {
  return to_string(s.alpha) + to_string(s.beta);
}

Operator<double> observable_matrix(AliceAxis axis) {
  switch (axis) {
    case AliceAxis::X: return pauli_x();
    case AliceAxis::Y: return pauli_y();
    case AliceAxis::Z: return pauli_z();
    case AliceAxis::D: return scaled_sum(pauli_x(), pauli_z());
    case AliceAxis::EPlus: return scaled_sum(pauli_x(), pauli_y());
    case AliceAxis::EMinus:
      return Operator<double>(kInvSqrt2 * (pauli_y().entries() - pauli_x().entries()));
    case AliceAxis::F: return scaled_sum(pauli_y(), pauli_z());
  }
  throw std::invalid_argument("bad AliceAxis");
}

Operator<double> observable_matrix(BobAxis axis) {
  switch (axis) {
    case BobAxis::X: return pauli_x();
    case BobAxis::Y: return Operator<double>(-pauli_y().entries());
    case BobAxis::Z: return pauli_z();
  }
  throw std::invalid_argument("bad BobAxis");
}

double ideal_correlation(MeasurementSetting s) {
  switch (setting_index(s)) {
    case 0: return 1.0;          // XX
    case 1: return 0.0;          // XY
    case 2: return 0.0;          // XZ
    case 3: return 1.0;          // YY
    case 4: return 0.0;          // YZ
    case 5: return 1.0;          // ZZ
    case 10: return -kInvSqrt2;  // E-X
    default: return kInvSqrt2;   // DX DZ E+X E+Y E-Y FY FZ
  }
}

void CorrelationLedger::record(MeasurementSetting s, int a, int b) {
  if ((a != 1 && a != -1) || (b != 1 && b != -1))
    throw std::invalid_argument("measurement products must be +-1");
  const int idx = setting_index(s);
  counts_[static_cast<std::size_t>(idx)] += 1;
  sums_[static_cast<std::size_t>(idx)] += static_cast<long long>(a) * b;
}

long long CorrelationLedger::count(MeasurementSetting s) const {
  return counts_[static_cast<std::size_t>(setting_index(s))];
}

double CorrelationLedger::estimator(MeasurementSetting s) const {
  const auto idx = static_cast<std::size_t>(setting_index(s));
  if (counts_[idx] == 0) return 0.0;
  return static_cast<double>(sums_[idx]) / static_cast<double>(counts_[idx]);
}

long long CorrelationLedger::total_records() const {
  long long total = 0;
  for (long long c : counts_) total += c;
  return total;
}

CorrelationLedger update_estimator(CorrelationLedger ledger, MeasurementSetting s,
                                   int a, int b) {
  ledger.record(s, a, b);
  return ledger;
}

void SecurityParams::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta_frac > 0.0 && delta_frac < 0.5))
    throw std::invalid_argument("delta_frac must be in (0, 1/2)");
  if (!(c >= 1.0)) throw std::invalid_argument("c must be at least 1");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (n_tilde < 1) throw std::invalid_argument("n_tilde must be at least 1");
}

long long SecurityParams::total_rounds() const {
  return m + std::llround(14.0 * c * static_cast<double>(n_tilde));
}

double azuma_delta(long long n_tilde, long long m, double epsilon) {
  if (n_tilde < 0 || m < 0) throw std::invalid_argument("negative counts");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double total = static_cast<double>(n_tilde + m);
  return std::exp(-total * epsilon * epsilon / 8.0);
}

double confidence(double delta, bool* degenerate) {
  if (delta < 0.0 || delta > 1.0) throw std::invalid_argument("delta out of range");
  if (degenerate) *degenerate = delta >= 0.5;
  if (delta >= 0.5) return 0.0;
  return std::pow(1.0 - delta, 3) * std::pow(1.0 - 2.0 * delta, 11);
}

double confidence_per_qubit(double delta, int m, bool* degenerate) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (delta < 0.0 || delta > 1.0) throw std::invalid_argument("delta out of range");
  if (degenerate) *degenerate = delta >= 0.5;
  if (delta >= 0.5) return 0.0;
  return std::pow(1.0 - delta, 3.0 * m) * std::pow(1.0 - 2.0 * delta, 11.0 * m);
}

double confidence(double delta, int m, ConfidenceConvention convention, bool* degenerate) {
  return convention == ConfidenceConvention::PerSession
             ? confidence(delta, degenerate)
             : confidence_per_qubit(delta, m, degenerate);
}

double chi_bound(long long n_tilde, long long m, double epsilon) {
  if (n_tilde + m <= 0) throw std::invalid_argument("n_tilde + m must be positive");
  const double nt = static_cast<double>(n_tilde);
  const double md = static_cast<double>(m);
  return (2.0 * nt * epsilon + md * (2.0 + epsilon)) / (nt + md);
}

EpsilonBounds epsilon_bounds(double chi) {
  if (chi < 0.0) throw std::invalid_argument("chi must be non-negative");
  const double sqrt2 = std::sqrt(2.0);
  const double root_2chi = std::sqrt(2.0 * chi);
  EpsilonBounds b;
  b.eps2 = root_2chi;
  b.eps1 = (1.0 + sqrt2) * std::sqrt((1.0 + 2.0 * sqrt2) * chi + root_2chi) +
           2.0 * root_2chi;
  b.eps_tilde = 0.5 * (9.0 * b.eps1 + b.eps2);
  return b;
}

double worst_case_prep_deviation(double mu, bool pessimistic) {
  constexpr double kTol = 1e-12;
  double table = 0.0;
  if (std::abs(mu - 1.0) <= kTol)
    table = -2.0;
  else if (std::abs(mu - kInvSqrt2) <= kTol)
    table = -(1.0 + kInvSqrt2);
  else if (std::abs(mu) <= kTol)
    table = 1.0;
  else if (std::abs(mu + kInvSqrt2) <= kTol)
    table = 1.0 + kInvSqrt2;
  else
    throw std::invalid_argument("mu is not one of the four ideal correlations");
  if (!pessimistic) return table;
  return table < 0.0 ? -2.0 : 2.0;
}

std::string to_json(const BoundReport& report) {
  nlohmann::json j;
  j["chi"] = report.chi;
  j["eps1"] = report.eps1;
  j["eps2"] = report.eps2;
  j["eps_tilde"] = report.eps_tilde;
  j["delta"] = report.delta;
  j["confidence"] = report.confidence;
  j["p_error_bound"] = report.p_error_bound;
  return j.dump();
}

BoundReport bound_report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  BoundReport r;
  r.chi = j.at("chi").get<double>();
  r.eps1 = j.at("eps1").get<double>();
  r.eps2 = j.at("eps2").get<double>();
  r.eps_tilde = j.at("eps_tilde").get<double>();
  r.delta = j.at("delta").get<double>();
  r.confidence = j.at("confidence").get<double>();
  r.p_error_bound = j.at("p_error_bound").get<double>();
  return r;
}

std::string Verdict::describe() const {
  std::ostringstream out;
  switch (code) {
    case Code::Accept: out << "accept"; break;
    case Code::InsufficientConfidence: out << "abort: insufficient confidence"; break;
    case Code::InsufficientStatistics: out << "abort: insufficient statistics"; break;
    case Code::CorrelationDeviation: out << "abort: correlation deviation"; break;
    case Code::ProtocolViolation: out << "abort: protocol violation"; break;
    case Code::TrapFailure: out << "reject: trap failure"; break;
  }
  if (setting) out << " [" << setting_name(*setting) << "]";
  if (!detail.empty()) out << " (" << detail << ")";
  return out.str();
}

Verdict acceptance_check(const CorrelationLedger& ledger, const SecurityParams& params,
                         ConfidenceConvention convention) {
  params.validate();
  const double delta = azuma_delta(params.n_tilde, params.m, params.epsilon);
  const double conf = confidence(delta, params.m, convention);
  if (conf < params.p)
    return {Verdict::Code::InsufficientConfidence, std::nullopt,
            "confidence " + std::to_string(conf)};
  for (const auto& s : all_settings())
    if (ledger.count(s) < params.n_tilde)
      return {Verdict::Code::InsufficientStatistics, s,
              "k=" + std::to_string(ledger.count(s))};
  for (const auto& s : all_settings()) {
    const double dev = std::abs(ledger.estimator(s) - ideal_correlation(s));
    if (dev > params.epsilon)
      return {Verdict::Code::CorrelationDeviation, s,
              "|C - mu| = " + std::to_string(dev)};
  }
  return {Verdict::Code::Accept, std::nullopt, ""};
}

ResourceEstimate resource_estimate(int m, double target_confidence, double c,
                                   double epsilon0) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (!(target_confidence > 0.0 && target_confidence < 1.0))
    throw std::invalid_argument("target confidence must be in (0,1)");
  if (!(c >= 1.0)) throw std::invalid_argument("c must be at least 1");
  if (!(epsilon0 > 0.0)) throw std::invalid_argument("epsilon0 must be positive");

  ResourceEstimate est;
  est.epsilon0 = epsilon0;
  est.epsilon = epsilon0 / (static_cast<double>(m) * m);
  const double needed =
      8.0 / (est.epsilon * est.epsilon) *
      std::log(28.0 * m / (1.0 - target_confidence));
  long long nm = static_cast<long long>(std::ceil(needed));
  // The chosen nm already yields delta = (1-p)/(28 m), comfortably inside the
  // target; bump as a guard in case of floating-point edge effects.
  while (confidence(azuma_delta(nm - m, m, est.epsilon)) < target_confidence)
    nm += nm / 8 + 1;
  est.n_tilde = std::max<long long>(1, nm - m);
  est.total_pairs = m + std::llround(14.0 * c * static_cast<double>(est.n_tilde));
  return est;
}

}  // namespace vbqc
