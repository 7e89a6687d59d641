#include "geosmc/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "geosmc/harness/trace_io.hpp"

namespace geosmc::harness {

using nlohmann::json;

unsigned thread_limit()
{
  if (const char* env = std::getenv("GEO_SMC_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0)
      return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SimTrace> run_all(const std::vector<SimConfig>& configs, unsigned threads)
{
  std::vector<SimTrace> traces(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++)
      traces[i] = run_scenario(configs[i]);
  };
  const unsigned n = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(1, configs.size())));
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < n; ++i)
    pool.emplace_back(worker);
  worker();
  return traces;
}

std::string trace_filename(Scenario scenario, ControllerKind controller)
{
  return "trace_" + std::string(to_string(scenario)) + "_" + std::string(to_string(controller)) + ".csv";
}

namespace {

json optional_time(const std::optional<double>& t)
{
  return t ? json(*t) : json(nullptr);
}

double peak(const SimTrace& trace, double SimRecord::*field)
{
  double m = 0.0;
  for (const auto& r : trace.records)
    m = std::max(m, r.*field);
  return m;
}

}  // namespace

json summarize(const SimTrace& trace)
{
  const SimConfig& c = trace.config;
  json j;
  j["scenario"] = to_string(c.scenario);
  j["controller"] = to_string(c.controller);
  j["seed"] = c.seed;
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["lambda"] = c.geometric.lambda();
  j["signed_sliding"] = c.geometric.sign == SlidingSign::Signed;
  if (c.scenario == Scenario::UncertainInertia) {
    j["inertia_scale"] = c.inertia_scale;
    j["m0_clamped"] = trace.m0_clamped;
  }
  if (c.scenario == Scenario::Noisy)
    j["noise_scales"] = {{"n1", trace.noise.quaternion}, {"n2", trace.noise.rate}};
  j["diverged"] = trace.diverged;
  if (trace.diverged)
    j["error"] = trace.error;
  if (!trace.records.empty()) {
    const SimRecord& last = trace.records.back();
    j["final"] = {{"t", last.t},
                  {"err_norm", last.err_norm},
                  {"s_norm", last.s_norm},
                  {"tau_norm", last.tau_norm},
                  {"energy", last.energy}};
    j["peak"] = {{"s_norm", peak(trace, &SimRecord::s_norm)}, {"tau_norm", peak(trace, &SimRecord::tau_norm)}};
    j["settle_time"] = {
        {"s_norm", optional_time(settle_time(trace, [](const SimRecord& r) { return r.s_norm; }, kSettleThreshold))},
        {"err_norm",
         optional_time(settle_time(trace, [](const SimRecord& r) { return r.err_norm; }, kSettleThreshold))},
        {"threshold", kSettleThreshold}};
  }
  return j;
}

void write_json(const json& doc, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out)
    throw std::runtime_error("I/O error while writing '" + path.string() + "'");
}

std::vector<ScenarioComparison> reproduce(const SimConfig& base, const std::vector<Scenario>& scenarios,
                                          const std::filesystem::path& out_dir, unsigned threads)
{
  std::filesystem::create_directories(out_dir);
  std::vector<SimConfig> configs;
  for (Scenario s : scenarios)
    for (ControllerKind k : {ControllerKind::Geometric, ControllerKind::Baseline}) {
      SimConfig c = base;
      c.scenario = s;
      c.controller = k;
      configs.push_back(c);
    }
  std::vector<SimTrace> traces = run_all(configs, threads);

  std::vector<ScenarioComparison> rows;
  json runs = json::array();
  json comparisons = json::array();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    ScenarioComparison row{scenarios[i], std::move(traces[2 * i]), std::move(traces[2 * i + 1]), {}};
    row.energy = compare_energy(row.geometric, row.baseline);
    for (const SimTrace* t : {&row.geometric, &row.baseline}) {
      write_trace_csv(*t, out_dir / trace_filename(t->config.scenario, t->config.controller));
      runs.push_back(summarize(*t));
    }
    comparisons.push_back({{"scenario", to_string(row.scenario)},
                           {"energy_geometric", row.energy.energy_a},
                           {"energy_baseline", row.energy.energy_b},
                           {"lower_energy", row.energy.order < 0   ? "geometric"
                                            : row.energy.order > 0 ? "baseline"
                                                                   : "equal"}});
    rows.push_back(std::move(row));
  }
  write_json({{"runs", runs}, {"comparisons", comparisons}}, out_dir / "summary.json");
  return rows;
}

std::string comparison_table(const std::vector<ScenarioComparison>& rows)
{
  auto fmt_time = [](const std::optional<double>& t) {
    std::ostringstream s;
    if (t)
      s << std::fixed << std::setprecision(2) << *t;
    else
      s << "-";
    return s.str();
  };
  auto s_metric = [](const SimRecord& r) { return r.s_norm; };
  auto e_metric = [](const SimRecord& r) { return r.err_norm; };

  std::ostringstream out;
  out << std::left << std::setw(19) << "scenario" << std::setw(11) << "controller" << std::right << std::setw(12)
      << "t(|s|<.01)" << std::setw(12) << "t(err<.01)" << std::setw(12) << "final err" << std::setw(12) << "energy"
      << '\n';
  for (const auto& row : rows) {
    for (const SimTrace* t : {&row.geometric, &row.baseline}) {
      const SimRecord& last = t->records.back();
      out << std::left << std::setw(19) << to_string(row.scenario) << std::setw(11) << to_string(t->config.controller)
          << std::right << std::setw(12) << fmt_time(settle_time(*t, s_metric, kSettleThreshold)) << std::setw(12)
          << fmt_time(settle_time(*t, e_metric, kSettleThreshold)) << std::setw(12) << std::scientific
          << std::setprecision(3) << last.err_norm << std::setw(12) << std::fixed << std::setprecision(4)
          << last.energy << (t->diverged ? "  DIVERGED" : "") << '\n';
    }
    out << "  lower energy: "
        << (row.energy.order < 0 ? "geometric" : row.energy.order > 0 ? "baseline" : "equal") << '\n';
  }
  return out.str();
}

json sweep(const SimConfig& base, const SweepGrid& grid, const std::filesystem::path& out_dir, unsigned threads)
{
  std::filesystem::create_directories(out_dir);
  const std::vector<double> lambdas = grid.lambdas.empty() ? std::vector<double>{base.geometric.lambda()} : grid.lambdas;
  const std::vector<double> krs = grid.kr_scales.empty() ? std::vector<double>{base.geometric.kr(0, 0)} : grid.kr_scales;
  const std::vector<std::uint64_t> seeds = grid.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : grid.seeds;

  std::vector<SimConfig> configs;
  for (double lambda : lambdas)
    for (double kr : krs)
      for (std::uint64_t seed : seeds) {
        SimConfig c = base;
        c.geometric = GeometricGainsd(GroupParams<double>(lambda), kr * Matrix4d::Identity(), base.geometric.sign);
        c.seed = seed;
        configs.push_back(c);
      }
  const std::vector<SimTrace> traces = run_all(configs, threads);

  std::ofstream csv(out_dir / "sweep.csv", std::ios::binary | std::ios::trunc);
  if (!csv)
    throw std::runtime_error("cannot open '" + (out_dir / "sweep.csv").string() + "' for writing");
  csv << "lambda,kr,seed,diverged,final_err_norm,final_s_norm,energy,settle_s_norm,settle_err_norm\n";
  json runs = json::array();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const SimTrace& t = traces[i];
    const json summary = summarize(t);
    runs.push_back(summary);
    const SimRecord& last = t.records.back();
    auto opt = [](const json& v) { return v.is_null() ? std::string() : format_double(v.get<double>()); };
    csv << format_double(t.config.geometric.lambda()) << ',' << format_double(t.config.geometric.kr(0, 0)) << ','
        << t.config.seed << ',' << (t.diverged ? 1 : 0) << ',' << format_double(last.err_norm) << ','
        << format_double(last.s_norm) << ',' << format_double(last.energy) << ','
        << opt(summary["settle_time"]["s_norm"]) << ',' << opt(summary["settle_time"]["err_norm"]) << '\n';
  }
  const json doc = {{"runs", runs}};
  write_json(doc, out_dir / "summary.json");
  return doc;
}

}  // namespace geosmc::harness
