#include "geosmc/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace geosmc::harness {

namespace {

using boost::property_tree::ptree;

std::string trim(std::string s)
{
  if (const auto hash = s.find('#'); hash != std::string::npos)
    s.erase(hash);
  const auto first = s.find_first_not_of(" \t\r\"'");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\"'");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(const std::string& key, const std::string& raw)
{
  std::string text = trim(raw);
  for (char& c : text)
    if (c == '[' || c == ']' || c == ',' || c == ';')
      c = ' ';
  std::vector<double> values;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
      throw ConfigError("key '" + key + "': '" + token + "' is not a number");
    values.push_back(v);
  }
  if (values.empty())
    throw ConfigError("key '" + key + "': empty value");
  return values;
}

double parse_scalar(const std::string& key, const std::string& raw)
{
  const auto v = parse_numbers(key, raw);
  if (v.size() != 1)
    throw ConfigError("key '" + key + "': expected a single number");
  return v.front();
}

template <int N>
Eigen::Matrix<double, N, 1> parse_vector(const std::string& key, const std::string& raw)
{
  const auto v = parse_numbers(key, raw);
  if (v.size() != N)
    throw ConfigError("key '" + key + "': expected " + std::to_string(N) + " numbers");
  return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
}

// One number -> scalar * I, N numbers -> diagonal, N*N numbers -> row-major matrix.
template <int N>
Eigen::Matrix<double, N, N> parse_matrix(const std::string& key, const std::string& raw)
{
  const auto v = parse_numbers(key, raw);
  using Mat = Eigen::Matrix<double, N, N>;
  if (v.size() == 1)
    return v.front() * Mat::Identity();
  if (v.size() == static_cast<std::size_t>(N))
    return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data()).asDiagonal();
  if (v.size() == static_cast<std::size_t>(N * N))
    return Eigen::Map<const Eigen::Matrix<double, N, N, Eigen::RowMajor>>(v.data());
  throw ConfigError("key '" + key + "': expected 1, " + std::to_string(N) + " or " + std::to_string(N * N) +
                    " numbers");
}

bool parse_bool(const std::string& key, const std::string& raw)
{
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  throw ConfigError("key '" + key + "': expected true or false");
}

std::uint64_t parse_seed(const std::string& key, const std::string& raw)
{
  const std::string v = trim(raw);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an unsigned integer");
  return seed;
}

const std::map<std::string, std::set<std::string>>& schema()
{
  static const std::map<std::string, std::set<std::string>> s = {
      {"simulation", {"dt", "t_end", "log_rate", "seed", "scenario", "controller", "signed_sliding"}},
      {"plant", {"inertia", "m0"}},
      {"geometric", {"lambda", "kr"}},
      {"baseline", {"lambda", "ks"}},
      {"initial", {"q", "omega", "qd", "omegad"}},
      {"uncertainty", {"inertia_scale"}},
      {"noise", {"n1_max", "n2_max", "redraw_scales"}},
  };
  return s;
}

SimConfig from_tree(const ptree& tree)
{
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty())
        throw ConfigError("key '" + section + "' must belong to a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body)
      if (!it->second.count(key))
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  }

  auto get = [&tree](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(ptree::path_type(path, '.')))
      return *v;
    return std::nullopt;
  };

  SimConfig c;
  if (auto v = get("simulation.dt")) c.dt = parse_scalar("dt", *v);
  if (auto v = get("simulation.t_end")) c.t_end = parse_scalar("t_end", *v);
  if (auto v = get("simulation.log_rate")) c.log_rate = parse_scalar("log_rate", *v);
  if (auto v = get("simulation.seed")) c.seed = parse_seed("seed", *v);
  if (auto v = get("simulation.scenario")) {
    const auto s = parse_scenario(trim(*v));
    if (!s)
      throw ConfigError("unknown scenario '" + trim(*v) + "'");
    c.scenario = *s;
  }
  if (auto v = get("simulation.controller")) {
    const auto k = parse_controller(trim(*v));
    if (!k)
      throw ConfigError("unknown controller '" + trim(*v) + "'");
    c.controller = *k;
  }

  try {
    Matrix3d inertia = c.plant.inertia();
    double m0 = c.plant.m0();
    if (auto v = get("plant.inertia")) inertia = parse_matrix<3>("inertia", *v);
    if (auto v = get("plant.m0")) m0 = parse_scalar("m0", *v);
    c.plant = RigidBodyParamsd(inertia, m0);

    double lambda = c.geometric.lambda();
    Matrix4d kr = c.geometric.kr;
    SlidingSign sign = c.geometric.sign;
    if (auto v = get("geometric.lambda")) lambda = parse_scalar("lambda", *v);
    if (auto v = get("geometric.kr")) kr = parse_matrix<4>("kr", *v);
    if (auto v = get("simulation.signed_sliding"))
      sign = parse_bool("signed_sliding", *v) ? SlidingSign::Signed : SlidingSign::Unsigned;
    c.geometric = GeometricGainsd(GroupParams<double>(lambda), kr, sign);

    Matrix4d big_lambda = c.baseline.lambda;
    Matrix4d ks = c.baseline.ks;
    if (auto v = get("baseline.lambda")) big_lambda = parse_matrix<4>("baseline.lambda", *v);
    if (auto v = get("baseline.ks")) ks = parse_matrix<4>("ks", *v);
    c.baseline = BaselineGainsd(big_lambda, ks);

    if (auto v = get("initial.q")) c.initial.q = UnitQuaterniond(parse_vector<4>("q", *v));
    if (auto v = get("initial.omega")) c.initial.omega = parse_vector<3>("omega", *v);
    if (auto v = get("initial.qd")) c.qd0 = UnitQuaterniond(parse_vector<4>("qd", *v));
    if (auto v = get("initial.omegad")) c.omegad = parse_vector<3>("omegad", *v);

    if (auto v = get("uncertainty.inertia_scale")) c.inertia_scale = parse_scalar("inertia_scale", *v);
    if (auto v = get("noise.n1_max")) c.noise.quaternion = parse_scalar("n1_max", *v);
    if (auto v = get("noise.n2_max")) c.noise.rate = parse_scalar("n2_max", *v);
    if (auto v = get("noise.redraw_scales")) c.redraw_noise_scales = parse_bool("redraw_scales", *v);

    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

// Strips comments and folds bracketed values that span several lines into one line.
std::string join_continuations(const std::string& text)
{
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  std::string pending;
  int depth = 0;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    // Section headers also use brackets, so only the value side of a key line counts.
    std::size_t from = 0;
    if (pending.empty()) {
      const auto eq = line.find('=');
      from = eq == std::string::npos ? line.size() : eq + 1;
    }
    for (std::size_t i = from; i < line.size(); ++i)
      depth += line[i] == '[' ? 1 : line[i] == ']' ? -1 : 0;
    pending += pending.empty() ? line : " " + line;
    if (depth <= 0) {
      out << pending << '\n';
      pending.clear();
      depth = 0;
    }
  }
  if (!pending.empty())
    throw ConfigError("unterminated '[' in value: " + pending);
  return out.str();
}

}  // namespace

SimConfig parse_config_text(const std::string& text)
{
  std::istringstream in(join_continuations(text));
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  return from_tree(tree);
}

SimConfig parse_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read configuration file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config_text(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace geosmc::harness
