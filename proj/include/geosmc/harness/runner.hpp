#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "geosmc/sim.hpp"

namespace geosmc::harness {

/// Settling threshold used by summaries and the comparison table.
inline constexpr double kSettleThreshold = 0.01;

/// Worker count: GEO_SMC_THREADS if set and positive, else hardware concurrency.
unsigned thread_limit();

/// Runs independent configurations, at most `threads` at a time. Output order matches input.
std::vector<SimTrace> run_all(const std::vector<SimConfig>& configs, unsigned threads);

std::string trace_filename(Scenario scenario, ControllerKind controller);

nlohmann::json summarize(const SimTrace& trace);

struct ScenarioComparison
{
  Scenario scenario;
  SimTrace geometric;
  SimTrace baseline;
  EnergyComparison energy;
};

/// Runs both controllers on each scenario, writes traces and summary.json into out_dir.
std::vector<ScenarioComparison> reproduce(const SimConfig& base, const std::vector<Scenario>& scenarios,
                                          const std::filesystem::path& out_dir, unsigned threads);

std::string comparison_table(const std::vector<ScenarioComparison>& rows);

struct SweepGrid
{
  std::vector<double> lambdas;
  std::vector<double> kr_scales;  ///< K_r = k I
  std::vector<std::uint64_t> seeds;
};

/// Grid over (lambda, K_r, seed) for the configured scenario/controller; writes sweep.csv and summary.json.
nlohmann::json sweep(const SimConfig& base, const SweepGrid& grid, const std::filesystem::path& out_dir,
                     unsigned threads);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace geosmc::harness
