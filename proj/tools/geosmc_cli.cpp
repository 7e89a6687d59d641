#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geosmc/harness/config.hpp"
#include "geosmc/harness/runner.hpp"
#include "geosmc/harness/trace_io.hpp"
#include "geosmc/harness/verify.hpp"

namespace {

using namespace geosmc;
using namespace geosmc::harness;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Flags shared by the simulation subcommands.
struct CommonFlags
{
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_end;
  bool signed_sliding = false;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
  cmd->add_option("--config", f.config, "Configuration file (INI-style sections)")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Noise seed");
  cmd->add_option("--dt", f.dt, "Integration step [s]")->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", f.t_end, "Simulated duration [s]")->check(CLI::PositiveNumber);
  cmd->add_flag("--signed-sliding", f.signed_sliding, "Use the sign-corrected sliding variable");
}

SimConfig load(const CommonFlags& f)
{
  SimConfig c = f.config.empty() ? SimConfig{} : parse_config(f.config);
  if (f.seed)
    c.seed = *f.seed;
  if (f.dt)
    c.dt = *f.dt;
  if (f.t_end)
    c.t_end = *f.t_end;
  if (f.signed_sliding)
    c.geometric.sign = SlidingSign::Signed;
  c.validate();
  return c;
}

std::vector<Scenario> to_scenarios(const std::vector<std::string>& names)
{
  std::vector<Scenario> out;
  for (const auto& n : names)
    out.push_back(*parse_scenario(n));
  return out;
}

const CLI::Validator kScenarioName(
    [](std::string& s) { return parse_scenario(s) ? std::string() : "unknown scenario '" + s + "'"; }, "SCENARIO");
const CLI::Validator kControllerName(
    [](std::string& s) { return parse_controller(s) ? std::string() : "unknown controller '" + s + "'"; },
    "CONTROLLER");

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Geometric sliding-mode attitude control: simulation and verification"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::vector<std::string> run_scenarios;
  std::vector<std::string> run_controllers;
  auto* run = app.add_subcommand("run", "Simulate configured scenarios; write traces and summary.json");
  add_common(run, run_flags);
  run->add_option("--scenario", run_scenarios, "ideal | uncertain_inertia | noisy (repeatable)")
      ->check(kScenarioName);
  run->add_option("--controller", run_controllers, "geometric | baseline (repeatable)")->check(kControllerName);

  std::vector<std::string> verify_suites;
  std::size_t verify_samples = 0;
  std::uint64_t verify_seed = VerifyOptions{}.seed;
  auto* verify = app.add_subcommand("verify", "Run the algebraic, group and dynamics property suites");
  verify->add_option("--suite", verify_suites, "quat | liegroup | dynamics (repeatable, default all)")
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("--samples", verify_samples, "Samples per algebraic property (default 10000)");
  verify->add_option("--seed", verify_seed, "Sampling seed")->capture_default_str();

  CommonFlags repro_flags;
  std::vector<std::string> repro_scenarios;
  auto* reproduce_cmd =
      app.add_subcommand("reproduce", "Run every scenario with both controllers and print the comparison table");
  add_common(reproduce_cmd, repro_flags);
  reproduce_cmd->add_option("--scenario", repro_scenarios, "Restrict to a scenario (repeatable)")
      ->check(kScenarioName);

  CommonFlags sweep_flags;
  std::string sweep_scenario;
  std::string sweep_controller;
  SweepGrid grid;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over lambda, K_r and seeds; write sweep.csv");
  add_common(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--scenario", sweep_scenario, "Scenario to sweep")->check(kScenarioName);
  sweep_cmd->add_option("--controller", sweep_controller, "Controller to sweep")->check(kControllerName);
  sweep_cmd->add_option("--lambda", grid.lambdas, "Lambda values")->delimiter(',')->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--kr", grid.kr_scales, "K_r = k I values")->delimiter(',')->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seeds", grid.seeds, "Seeds")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const unsigned threads = thread_limit();

    if (*run) {
      SimConfig base = load(run_flags);
      std::vector<Scenario> scenarios = run_scenarios.empty() ? std::vector<Scenario>{base.scenario}
                                                               : to_scenarios(run_scenarios);
      std::vector<ControllerKind> controllers;
      for (const auto& n : run_controllers)
        controllers.push_back(*parse_controller(n));
      if (controllers.empty())
        controllers.push_back(base.controller);

      std::vector<SimConfig> configs;
      for (Scenario s : scenarios)
        for (ControllerKind k : controllers) {
          SimConfig c = base;
          c.scenario = s;
          c.controller = k;
          configs.push_back(c);
        }
      const std::filesystem::path out(run_flags.out);
      std::filesystem::create_directories(out);
      nlohmann::json runs = nlohmann::json::array();
      bool diverged = false;
      for (const SimTrace& t : run_all(configs, threads)) {
        const auto file = out / trace_filename(t.config.scenario, t.config.controller);
        write_trace_csv(t, file);
        runs.push_back(summarize(t));
        diverged = diverged || t.diverged;
        std::cout << file.string() << (t.diverged ? "  (diverged: " + t.error + ")" : "") << '\n';
      }
      write_json({{"runs", runs}}, out / "summary.json");
      return diverged ? kExitFailure : 0;
    }

    if (*verify) {
      VerifyOptions opts;
      opts.seed = verify_seed;
      if (verify_samples > 0) {
        opts.algebra_samples = verify_samples;
        opts.dynamics_samples = std::max<std::size_t>(1, verify_samples / 10);
      }
      const std::vector<std::string>& suites = verify_suites.empty() ? suite_names() : verify_suites;
      std::size_t failed = 0;
      std::size_t total = 0;
      for (const auto& suite : suites) {
        const auto results = verify_suite(suite, opts);
        std::cout << format_results(results);
        for (const auto& r : results) {
          ++total;
          failed += r.passed() ? 0 : 1;
        }
      }
      std::cout << (total - failed) << '/' << total << " properties passed\n";
      return failed == 0 ? 0 : kExitFailure;
    }

    if (*reproduce_cmd) {
      const SimConfig base = load(repro_flags);
      const std::vector<Scenario> scenarios =
          repro_scenarios.empty()
              ? std::vector<Scenario>{Scenario::Ideal, Scenario::UncertainInertia, Scenario::Noisy}
              : to_scenarios(repro_scenarios);
      const auto rows = reproduce(base, scenarios, repro_flags.out, threads);
      std::cout << comparison_table(rows);
      for (const auto& row : rows)
        if (row.geometric.diverged || row.baseline.diverged)
          return kExitFailure;
      return 0;
    }

    if (*sweep_cmd) {
      SimConfig base = load(sweep_flags);
      if (!sweep_scenario.empty())
        base.scenario = *parse_scenario(sweep_scenario);
      if (!sweep_controller.empty())
        base.controller = *parse_controller(sweep_controller);
      const auto doc = sweep(base, grid, sweep_flags.out, threads);
      std::cout << (std::filesystem::path(sweep_flags.out) / "sweep.csv").string() << ": " << doc["runs"].size()
                << " runs\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
