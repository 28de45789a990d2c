#include "vbqc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "vbqc/brickwork.hpp"

namespace vbqc {

namespace {

std::string fmt17(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<AngleOctant> octants_of(const std::vector<int>& ks, int count) {
  std::vector<AngleOctant> phi;
  if (ks.empty()) {
    phi.assign(static_cast<std::size_t>(count), AngleOctant(0));
    return phi;
  }
  if (static_cast<int>(ks.size()) != count)
    throw std::invalid_argument("phi must list one octant per vertex");
  for (int k : ks) phi.push_back(AngleOctant(k));
  return phi;
}

enum class Expectation { Accept, AbortPhaseOne, RejectPhaseTwo, None };

Expectation expected_outcome(const ExperimentConfig& config) {
  const auto report = make_bound_report(config.params, config.convention);
  if (report.confidence < config.params.p) return Expectation::AbortPhaseOne;
  // Statistical margin on the per-setting estimators.
  const double margin =
      5.0 / std::sqrt(std::max(1.0, config.params.c * static_cast<double>(config.params.n_tilde)));
  if (config.strategy == "honest") return Expectation::Accept;
  if (config.strategy == "flip-all") return Expectation::RejectPhaseTwo;
  if (config.strategy == "classical-cheat") return Expectation::AbortPhaseOne;
  if (config.strategy == "depolarizing") {
    const double deviation = 1.0 - config.strategy_parameter;
    if (deviation > config.params.epsilon + margin) return Expectation::AbortPhaseOne;
    if (deviation < config.params.epsilon - margin) return Expectation::Accept;
    return Expectation::None;
  }
  if (config.strategy == "miscalibrated") {
    const double deviation = 1.0 - std::cos(config.strategy_parameter);
    if (deviation > config.params.epsilon + margin) return Expectation::AbortPhaseOne;
    if (deviation < config.params.epsilon - margin) return Expectation::Accept;
    return Expectation::None;
  }
  return Expectation::None;
}

bool trial_passes(Expectation expected, const TrialRow& row) {
  switch (expected) {
    case Expectation::Accept:
      return row.phase_one_accepted && row.phase_two_accepted;
    case Expectation::AbortPhaseOne:
      return !row.phase_one_accepted;
    case Expectation::RejectPhaseTwo:
      return row.phase_one_accepted && !row.phase_two_accepted;
    case Expectation::None:
      return true;
  }
  return true;
}

}  // namespace

BoundReport cmd_bounds(const BoundsQuery& query) {
  if (query.m < 1) throw std::invalid_argument("m must be at least 1");
  if (!(query.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (query.n_tilde < 1) throw std::invalid_argument("n_tilde must be at least 1");
  if (!(query.delta_frac > 0.0 && query.delta_frac < 0.5))
    throw std::invalid_argument("delta_frac must be in (0, 1/2)");
  if (!(query.c >= 1.0)) throw std::invalid_argument("c must be at least 1");
  SecurityParams params;
  params.p = 0.5;  // the report never reads the target; keep params valid
  params.epsilon = query.epsilon;
  params.delta_frac = query.delta_frac;
  params.c = query.c;
  params.m = query.m;
  params.n_tilde = query.n_tilde;
  return make_bound_report(params, query.convention, query.ideal_chi);
}

std::string bounds_text(const BoundReport& report) {
  std::ostringstream out;
  out << "chi           " << fmt17(report.chi) << "\n"
      << "eps1          " << fmt17(report.eps1) << "\n"
      << "eps2          " << fmt17(report.eps2) << "\n"
      << "eps_tilde     " << fmt17(report.eps_tilde) << "\n"
      << "delta         " << fmt17(report.delta) << "\n"
      << "confidence    " << fmt17(report.confidence) << "\n"
      << "p_error_bound " << fmt17(report.p_error_bound) << "\n";
  return out.str();
}

std::vector<ScalingRow> cmd_scaling(const std::vector<int>& m_list,
                                    double target_confidence, double c) {
  if (m_list.empty()) throw std::invalid_argument("m list must not be empty");
  for (std::size_t i = 1; i < m_list.size(); ++i)
    if (m_list[i] <= m_list[i - 1])
      throw std::invalid_argument("m list must be strictly ascending");
  std::vector<ScalingRow> rows;
  for (int m : m_list) {
    const auto est = resource_estimate(m, target_confidence, c);
    ScalingRow row;
    row.m = m;
    row.epsilon = est.epsilon;
    row.n_tilde = est.n_tilde;
    row.total_pairs = est.total_pairs;
    const double md = static_cast<double>(m);
    row.ratio = static_cast<double>(est.total_pairs) /
                (md * md * md * md * std::log(std::max(m, 2)));
    rows.push_back(row);
  }
  return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::ostringstream out;
  out << "m,epsilon,n_tilde,total_pairs,ratio\n";
  for (const auto& r : rows)
    out << r.m << "," << fmt17(r.epsilon) << "," << r.n_tilde << "," << r.total_pairs
        << "," << fmt17(r.ratio) << "\n";
  return out.str();
}

ExperimentConfig config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("schema").get<int>() != 1)
    throw std::invalid_argument("unsupported config schema");
  ExperimentConfig c;
  c.command = j.at("command").get<std::string>();
  const auto& p = j.at("params");
  c.params.p = p.at("p").get<double>();
  c.params.epsilon = p.at("epsilon").get<double>();
  c.params.delta_frac = p.at("delta_frac").get<double>();
  c.params.c = p.value("c", 1.0);
  c.params.m = p.at("m").get<int>();
  c.params.n_tilde = p.at("n_tilde").get<long long>();
  c.rows = j.value("rows", 4);
  c.cols = j.value("cols", 9);
  if (j.contains("phi")) c.phi_octants = j.at("phi").get<std::vector<int>>();
  if (j.contains("strategy")) {
    c.strategy = j.at("strategy").at("name").get<std::string>();
    c.strategy_parameter = j.at("strategy").value("parameter", 0.0);
  }
  c.sweep_kind = j.value("sweep_kind", std::string("depolarizing"));
  if (j.contains("sweep_values"))
    c.sweep_values = j.at("sweep_values").get<std::vector<double>>();
  c.trials = j.value("trials", 1);
  c.seed = j.at("seed").get<std::uint64_t>();
  c.format = j.value("format", std::string("csv"));
  c.convention = j.value("per_qubit_confidence", false)
                     ? ConfidenceConvention::PerQubit
                     : ConfidenceConvention::PerSession;
  if (c.trials < 1) throw std::invalid_argument("trial count must be at least 1");
  c.params.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["schema"] = c.schema;
  j["command"] = c.command;
  j["params"] = {{"p", c.params.p},
                 {"epsilon", c.params.epsilon},
                 {"delta_frac", c.params.delta_frac},
                 {"c", c.params.c},
                 {"m", c.params.m},
                 {"n_tilde", c.params.n_tilde}};
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  if (!c.phi_octants.empty()) j["phi"] = c.phi_octants;
  j["strategy"] = {{"name", c.strategy}, {"parameter", c.strategy_parameter}};
  j["sweep_kind"] = c.sweep_kind;
  if (!c.sweep_values.empty()) j["sweep_values"] = c.sweep_values;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["format"] = c.format;
  j["per_qubit_confidence"] = c.convention == ConfidenceConvention::PerQubit;
  return j.dump(2);
}

std::unique_ptr<ProverStrategy> make_strategy(const std::string& name, double parameter) {
  if (name == "honest") return std::make_unique<HonestStrategy>();
  if (name == "depolarizing") return std::make_unique<DepolarizingStrategy>(parameter);
  if (name == "miscalibrated") return std::make_unique<MiscalibratedStrategy>(parameter);
  if (name == "classical-cheat") return std::make_unique<ClassicalCheatStrategy>();
  if (name == "flip-all") return std::make_unique<FlipAllStrategy>();
  if (name == "single-vertex-deviate")
    return std::make_unique<SingleVertexDeviateStrategy>(static_cast<VertexId>(parameter));
  throw std::invalid_argument("unknown strategy: " + name);
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
  return RandomStream(base_seed).split(static_cast<std::uint64_t>(trial)).key();
}

void parallel_trials(int trials, const std::function<void(int)>& body) {
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), 8u);
  if (workers <= 1 || trials <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) body(t);
    });
  for (auto& th : pool) th.join();
}

namespace {

TrialRow run_one_session(const ExperimentConfig& config, int trial) {
  TrialRow row;
  row.trial = trial;
  row.seed = trial_seed(config.seed, trial);

  SessionConfig session;
  session.params = config.params;
  session.rows = config.rows;
  session.cols = config.cols;
  session.phi = octants_of(config.phi_octants, config.rows * config.cols);
  session.convention = config.convention;

  HonestStrategy device;
  auto bob = make_strategy(config.strategy, config.strategy_parameter);
  const auto result = run_full_session(session, device, *bob, row.seed);

  row.phase_one_accepted = result.phase_one.verdict.accepted();
  row.verdict = result.phase_one.verdict.describe();
  double max_dev = 0;
  long long min_count = result.phase_one.ledger.count(all_settings()[0]);
  for (const auto& s : all_settings()) {
    max_dev = std::max(max_dev, std::abs(result.phase_one.ledger.estimator(s) -
                                         ideal_correlation(s)));
    min_count = std::min(min_count, result.phase_one.ledger.count(s));
  }
  row.max_deviation = max_dev;
  row.min_setting_count = min_count;

  if (result.phase_two) {
    row.phase_two_accepted = result.phase_two->verdict.accepted();
    row.verdict = result.phase_two->verdict.describe();
    for (int bit : result.phase_two->output_bits)
      row.output_bits.push_back(bit ? '1' : '0');
  }
  return row;
}

TrialRow run_one_selftest(const ExperimentConfig& config, int trial) {
  TrialRow row;
  row.trial = trial;
  row.seed = trial_seed(config.seed, trial);

  HonestStrategy device;
  auto bob = make_strategy(config.strategy, config.strategy_parameter);
  std::vector<PrepKind> kinds(static_cast<std::size_t>(config.params.m),
                              PrepKind::Computation);
  RandomStream rng(row.seed);
  const auto result =
      run_phase_one(config.params, device, *bob, rng, kinds, config.convention);
  row.phase_one_accepted = result.verdict.accepted();
  row.phase_two_accepted = result.verdict.accepted();  // no second phase here
  row.verdict = result.verdict.describe();
  double max_dev = 0;
  long long min_count = result.ledger.count(all_settings()[0]);
  for (const auto& s : all_settings()) {
    max_dev =
        std::max(max_dev, std::abs(result.ledger.estimator(s) - ideal_correlation(s)));
    min_count = std::min(min_count, result.ledger.count(s));
  }
  row.max_deviation = max_dev;
  row.min_setting_count = min_count;
  return row;
}

Report assemble_report(const ExperimentConfig& config, std::vector<TrialRow> rows,
                       bool phase_two_expected) {
  Report report;
  report.config = config;
  report.bounds = make_bound_report(config.params, config.convention);
  const Expectation expected = expected_outcome(config);
  int accepted = 0;
  for (auto& row : rows) {
    Expectation row_expected = expected;
    if (!phase_two_expected && expected == Expectation::RejectPhaseTwo)
      row_expected = Expectation::None;
    row.pass = trial_passes(row_expected, row);
    if (row.phase_one_accepted && (!phase_two_expected || row.phase_two_accepted))
      ++accepted;
    report.all_pass = report.all_pass && row.pass;
  }
  report.rows = std::move(rows);
  report.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(report.rows.size());
  return report;
}

}  // namespace

Report cmd_selftest_run(const ExperimentConfig& config) {
  std::vector<TrialRow> rows(static_cast<std::size_t>(config.trials));
  parallel_trials(config.trials, [&](int t) {
    rows[static_cast<std::size_t>(t)] = run_one_selftest(config, t);
  });
  return assemble_report(config, std::move(rows), false);
}

Report cmd_full_run(const ExperimentConfig& config) {
  if (config.params.m != config.rows * config.cols)
    throw std::invalid_argument("params.m must equal rows * cols");
  std::vector<TrialRow> rows(static_cast<std::size_t>(config.trials));
  parallel_trials(config.trials, [&](int t) {
    rows[static_cast<std::size_t>(t)] = run_one_session(config, t);
  });
  return assemble_report(config, std::move(rows), true);
}

Report cmd_sweep(const ExperimentConfig& config) {
  if (config.sweep_values.empty())
    throw std::invalid_argument("sweep requires sweep_values");
  Report report;
  report.config = config;
  report.bounds = make_bound_report(config.params, config.convention);

  if (config.sweep_kind == "isometry") {
    for (double eta : config.sweep_values) {
      const auto rows = extraction_sweep_point(detuned_bell(eta), rotated_assignment(0.0));
      for (const auto& r : rows) {
        report.isometry_rows.push_back(r);
        report.all_pass = report.all_pass && r.distance <= r.eps_tilde_bound + 1e-9;
      }
    }
    return report;
  }

  if (config.sweep_kind != "depolarizing")
    throw std::invalid_argument("unknown sweep kind: " + config.sweep_kind);

  double previous_rate = -1.0;
  for (std::size_t i = 0; i < config.sweep_values.size(); ++i) {
    const double q = config.sweep_values[i];
    ExperimentConfig point = config;
    point.strategy = "depolarizing";
    point.strategy_parameter = q;
    point.seed = trial_seed(config.seed, static_cast<int>(i) + 1);

    std::vector<TrialRow> rows(static_cast<std::size_t>(config.trials));
    parallel_trials(config.trials, [&](int t) {
      rows[static_cast<std::size_t>(t)] = run_one_selftest(point, t);
    });
    int aborts = 0;
    for (const auto& row : rows)
      if (!row.phase_one_accepted) ++aborts;
    SweepRowOut out;
    out.value = q;
    out.trials = config.trials;
    out.abort_rate = static_cast<double>(aborts) / static_cast<double>(config.trials);
    report.sweep_rows.push_back(out);

    // Sweep values run from noisy to clean: abort rate must not increase,
    // up to 3 sigma of Monte Carlo noise.
    if (previous_rate >= 0.0) {
      const double sigma = std::sqrt(std::max(previous_rate * (1 - previous_rate), 0.25 / config.trials) /
                                     config.trials);
      report.all_pass = report.all_pass && out.abort_rate <= previous_rate + 3 * sigma;
    }
    previous_rate = out.abort_rate;
  }
  return report;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  if (!isometry_rows.empty()) {
    out << "chi_actual,distance,eps_tilde_bound,sigma,outcome\n";
    for (const auto& r : isometry_rows)
      out << fmt17(r.chi) << "," << fmt17(r.distance) << "," << fmt17(r.eps_tilde_bound)
          << "," << r.sigma << "," << r.outcome << "\n";
    return out.str();
  }
  if (!sweep_rows.empty()) {
    out << "value,trials,abort_rate\n";
    for (const auto& r : sweep_rows)
      out << fmt17(r.value) << "," << r.trials << "," << fmt17(r.abort_rate) << "\n";
    return out.str();
  }
  out << "trial,seed,phase_one_accepted,phase_two_accepted,pass,verdict,"
         "output_bits,max_deviation,min_setting_count\n";
  for (const auto& r : rows)
    out << r.trial << "," << r.seed << "," << (r.phase_one_accepted ? 1 : 0) << ","
        << (r.phase_two_accepted ? 1 : 0) << "," << (r.pass ? 1 : 0) << ",\""
        << r.verdict << "\"," << r.output_bits << "," << fmt17(r.max_deviation) << ","
        << r.min_setting_count << "\n";
  return out.str();
}

std::string Report::to_json() const {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json(config));
  j["bounds"] = nlohmann::json::parse(vbqc::to_json(bounds));
  j["acceptance_rate"] = acceptance_rate;
  j["all_pass"] = all_pass;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"trial", r.trial},
                         {"seed", r.seed},
                         {"phase_one_accepted", r.phase_one_accepted},
                         {"phase_two_accepted", r.phase_two_accepted},
                         {"pass", r.pass},
                         {"verdict", r.verdict},
                         {"output_bits", r.output_bits},
                         {"max_deviation", r.max_deviation},
                         {"min_setting_count", r.min_setting_count}});
  }
  j["rows"] = rows_json;
  nlohmann::json sweeps = nlohmann::json::array();
  for (const auto& r : sweep_rows)
    sweeps.push_back({{"value", r.value}, {"trials", r.trials}, {"abort_rate", r.abort_rate}});
  j["sweep_rows"] = sweeps;
  nlohmann::json iso = nlohmann::json::array();
  for (const auto& r : isometry_rows)
    iso.push_back({{"chi_actual", r.chi},
                   {"distance", r.distance},
                   {"eps_tilde_bound", r.eps_tilde_bound},
                   {"sigma", r.sigma},
                   {"outcome", r.outcome}});
  j["isometry_rows"] = iso;
  return j.dump(2);
}

}  // namespace vbqc
