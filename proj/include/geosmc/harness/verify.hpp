#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace geosmc::harness {

/// Outcome of one property checked over random samples.
struct PropertyResult
{
  std::string suite;
  std::string name;
  std::size_t samples = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  double tol = 0.0;

  bool passed() const { return samples > 0 && failures == 0; }
};

struct VerifyOptions
{
  std::size_t algebra_samples = 10000;  ///< quat and liegroup suites
  std::size_t dynamics_samples = 1000;
  std::uint64_t seed = 2024;
};

/// J/L and Q/W identities, SO(4) membership, Rodrigues homomorphism.
std::vector<PropertyResult> verify_quat(const VerifyOptions& opts = {});

/// Group axioms for lambda in {0.1, 1, 10}, tangency preservation, subgroup closure.
std::vector<PropertyResult> verify_liegroup(const VerifyOptions& opts = {});

/// Mass-matrix bounds, skew identity, error-rate consistency, model equivalence, free-body energy.
std::vector<PropertyResult> verify_dynamics(const VerifyOptions& opts = {});

std::vector<PropertyResult> verify_suite(const std::string& suite, const VerifyOptions& opts = {});

/// Suite names accepted by verify_suite, in run order.
const std::vector<std::string>& suite_names();

std::string format_results(const std::vector<PropertyResult>& results);

}  // namespace geosmc::harness
