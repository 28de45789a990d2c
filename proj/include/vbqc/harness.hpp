#pragma once

// Experiment drivers behind the CLI: bound reports, resource-scaling tables,
// seeded phase-one and full-protocol batches, and parameter sweeps, with
// deterministic per-trial seed derivation and diff-able CSV/JSON output.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vbqc/isometry.hpp"
#include "vbqc/protocol.hpp"
#include "vbqc/selftest.hpp"
#include "vbqc/verification.hpp"

namespace vbqc {

struct BoundsQuery {
  int m = 1;
  double epsilon = 0.1;
  long long n_tilde = 1;
  double delta_frac = 0.25;
  double c = 1.0;
  bool ideal_chi = false;
  ConfidenceConvention convention = ConfidenceConvention::PerSession;
};

BoundReport cmd_bounds(const BoundsQuery& query);
std::string bounds_text(const BoundReport& report);

struct ScalingRow {
  int m = 0;
  double epsilon = 0;
  long long n_tilde = 0;
  long long total_pairs = 0;
  double ratio = 0;  // N / (m^4 ln(max(m,2)))
};

std::vector<ScalingRow> cmd_scaling(const std::vector<int>& m_list,
                                    double target_confidence = 0.99, double c = 1.0);
std::string scaling_csv(const std::vector<ScalingRow>& rows);

struct ExperimentConfig {
  int schema = 1;
  std::string command = "full-run";  // selftest-run | full-run | sweep
  SecurityParams params;
  int rows = 4;
  int cols = 9;
  std::vector<int> phi_octants;  // empty = all zero
  std::string strategy = "honest";
  double strategy_parameter = 0.0;  // q, eta, or target vertex
  std::string sweep_kind = "depolarizing";  // depolarizing | isometry
  std::vector<double> sweep_values;
  int trials = 1;
  std::uint64_t seed = 1;
  std::string format = "csv";  // csv | json
  ConfidenceConvention convention = ConfidenceConvention::PerSession;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

struct TrialRow {
  int trial = 0;
  std::uint64_t seed = 0;
  bool phase_one_accepted = false;
  bool phase_two_accepted = false;
  bool pass = true;
  std::string verdict;
  std::string output_bits;
  double max_deviation = 0;
  long long min_setting_count = 0;
};

struct SweepRowOut {
  double value = 0;
  int trials = 0;
  double abort_rate = 0;
  double detection_rate = 0;
};

struct Report {
  ExperimentConfig config;
  BoundReport bounds;
  std::vector<TrialRow> rows;
  std::vector<SweepRowOut> sweep_rows;
  std::vector<SweepRow> isometry_rows;  // chi, distance, bound, sigma, outcome
  double acceptance_rate = 0;
  bool all_pass = true;

  std::string to_csv() const;
  std::string to_json() const;
};

Report cmd_selftest_run(const ExperimentConfig& config);
Report cmd_full_run(const ExperimentConfig& config);
Report cmd_sweep(const ExperimentConfig& config);

// Built-in prover strategies by name: honest, depolarizing(q),
// miscalibrated(eta), classical-cheat, flip-all, single-vertex-deviate(v).
std::unique_ptr<ProverStrategy> make_strategy(const std::string& name, double parameter);

// Per-trial seeds from the config seed via the splittable stream.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

// Deterministic fan-out over worker threads; results land by trial index.
void parallel_trials(int trials, const std::function<void(int)>& body);

}  // namespace vbqc
