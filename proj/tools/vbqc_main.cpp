// vbqc: simulator and bound checker for two-phase device-independent
// verifiable blind quantum computation at desk scale.
//
// Exit codes: 0 all checks pass, 1 an experiment's pass/fail flag failed,
// 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vbqc/harness.hpp"

namespace {

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot open output path: " << path << "\n";
    return 2;
  }
  out << text;
  return 0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int emit_report(const vbqc::Report& report, const std::string& format,
                const std::string& out_path) {
  const std::string text = format == "json" ? report.to_json() : report.to_csv();
  const int rc = write_output(text, out_path);
  if (rc != 0) return rc;
  return report.all_pass ? 0 : 1;
}

vbqc::ExperimentConfig load_config(const std::string& config_path, std::uint64_t seed,
                                   int trials, const std::string& format) {
  auto config = vbqc::config_from_json(slurp(config_path));
  if (seed != 0) config.seed = seed;
  if (trials != 0) config.trials = trials;
  if (!format.empty()) config.format = format;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-phase verifiable blind quantum computation simulator"};
  app.require_subcommand(1);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "print the analytic bound report");
  vbqc::BoundsQuery query;
  bool per_qubit = false;
  bounds->add_option("--m", query.m, "prepared-qubit count")->required();
  bounds->add_option("--epsilon", query.epsilon, "correlation tolerance")->required();
  bounds->add_option("--n-tilde", query.n_tilde, "per-setting test count")->required();
  bounds->add_option("--delta", query.delta_frac, "verifiability constant Delta")
      ->required();
  bounds->add_option("--c", query.c, "oversampling constant");
  bounds->add_flag("--ideal", query.ideal_chi, "assume perfectly prepared inputs (chi = 0)");
  bounds->add_flag("--per-qubit", per_qubit, "use the per-qubit confidence variant");

  // scaling
  auto* scaling = app.add_subcommand("scaling", "resource scaling table N(m)");
  std::vector<int> m_list;
  double target = 0.99;
  double c_scaling = 1.0;
  std::string out_path;
  scaling->add_option("--m", m_list, "ascending list of computation sizes")->required();
  scaling->add_option("--target", target, "target confidence");
  scaling->add_option("--c", c_scaling, "oversampling constant");

  // config-driven commands
  std::string config_path;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string format;
  for (const char* name : {"selftest-run", "full-run", "sweep"}) {
    auto* sub = app.add_subcommand(
        name, std::string(name) + " from a JSON experiment config");
    sub->add_option("--config", config_path, "experiment config JSON path")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--trials", trials, "override the trial count");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--out", out_path, "write the report here instead of stdout");
  }
  bounds->add_option("--out", out_path, "write the report here instead of stdout");
  scaling->add_option("--out", out_path, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (bounds->parsed()) {
      query.convention = per_qubit ? vbqc::ConfidenceConvention::PerQubit
                                   : vbqc::ConfidenceConvention::PerSession;
      const auto report = vbqc::cmd_bounds(query);
      return write_output(vbqc::bounds_text(report) + vbqc::to_json(report) + "\n",
                          out_path);
    }
    if (scaling->parsed()) {
      const auto rows = vbqc::cmd_scaling(m_list, target, c_scaling);
      return write_output(vbqc::scaling_csv(rows), out_path);
    }
    if (app.got_subcommand("selftest-run")) {
      const auto config = load_config(config_path, seed, trials, format);
      return emit_report(vbqc::cmd_selftest_run(config), config.format, out_path);
    }
    if (app.got_subcommand("full-run")) {
      const auto config = load_config(config_path, seed, trials, format);
      return emit_report(vbqc::cmd_full_run(config), config.format, out_path);
    }
    if (app.got_subcommand("sweep")) {
      const auto config = load_config(config_path, seed, trials, format);
      return emit_report(vbqc::cmd_sweep(config), config.format, out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
