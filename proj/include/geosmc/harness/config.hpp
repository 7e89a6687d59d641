#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "geosmc/sim.hpp"

namespace geosmc::harness {

class ConfigError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Reads an INI/TOML-style configuration:
 *
 *   [simulation]  dt, t_end, log_rate, seed, scenario, controller, signed_sliding
 *   [plant]       inertia (1, 3 or 9 numbers), m0
 *   [geometric]   lambda, kr (1, 4 or 16 numbers)
 *   [baseline]    lambda, ks (1, 4 or 16 numbers)
 *   [initial]     q, omega, qd, omegad
 *   [uncertainty] inertia_scale
 *   [noise]       n1_max, n2_max, redraw_scales
 *
 * Omitted keys keep the reference defaults. Unknown sections or keys,
 * malformed numbers, non-SPD gains, and lambda <= 0 throw ConfigError.
 */
SimConfig parse_config(const std::filesystem::path& path);
SimConfig parse_config_text(const std::string& text);

}  // namespace geosmc::harness
