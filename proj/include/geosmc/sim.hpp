#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geosmc/control.hpp"
#include "geosmc/dynamics.hpp"

namespace geosmc {

enum class Scenario
{
  Ideal,
  UncertainInertia,
  Noisy,
};

enum class ControllerKind
{
  Geometric,
  Baseline,
};

std::string_view to_string(Scenario s);
std::string_view to_string(ControllerKind c);
std::optional<Scenario> parse_scenario(std::string_view name);
std::optional<ControllerKind> parse_controller(std::string_view name);

/// Upper bounds of the uniform draws for the quaternion and rate noise scales.
struct NoiseCaps
{
  double quaternion = 0.1;
  double rate = 0.1;
};

/// Realized noise scales n1 (quaternion) and n2 (rate).
struct NoiseScales
{
  double quaternion = 0.0;
  double rate = 0.0;
};

class DivergenceError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Initial attitude [0, u/|u|] with u = [1, 2, 3].
UnitQuaterniond reference_initial_attitude();

struct SimConfig
{
  double dt = 1e-3;
  double t_end = 100.0;
  double log_rate = 100.0;  ///< Hz
  std::uint64_t seed = 1;
  Scenario scenario = Scenario::Ideal;
  ControllerKind controller = ControllerKind::Geometric;

  double inertia_scale = 0.7;  ///< controller-side inertia factor in the uncertain scenario
  NoiseCaps noise;
  bool redraw_noise_scales = false;  ///< redraw n1, n2 every control step instead of once per run

  BodyStated initial{reference_initial_attitude(), Vector3d::Zero()};
  UnitQuaterniond qd0 = UnitQuaterniond::identity();
  Vector3d omegad = Vector3d(0.0, 0.0, 0.1);

  RigidBodyParamsd plant = reference_body();
  GeometricGainsd geometric = default_geometric_gains();
  BaselineGainsd baseline = default_baseline_gains();

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  std::int64_t steps() const;
  std::int64_t log_stride() const;
};

struct SimRecord
{
  double t = 0.0;
  Vector4d q = Vector4d::Zero();
  Vector3d omega = Vector3d::Zero();
  Vector4d qd = Vector4d::Zero();
  Vector3d omegad = Vector3d::Zero();
  Vector4d qe = Vector4d::Zero();
  Vector4d s = Vector4d::Zero();
  Vector3d tau = Vector3d::Zero();
  double err_norm = 0.0;
  double s_norm = 0.0;
  double tau_norm = 0.0;
  double energy = 0.0;
};

struct SimTrace
{
  SimConfig config;
  std::vector<SimRecord> records;
  NoiseScales noise;  ///< realized scales (first draw when redrawing)
  bool m0_clamped = false;
  bool diverged = false;
  std::string error;
};

/// Right-hand side of the coupled kinematics and Euler dynamics.
struct BodyRate
{
  Vector4d qdot;
  Vector3d omega_dot;
};

BodyRate body_rate(const UnitQuaterniond& q, const Vector3d& omega, const Vector3d& tau,
                   const RigidBodyParamsd& params);

/**
 * Classical RK4 on (q, omega) with the torque held over the step. The
 * quaternion is renormalized afterwards. Throws DivergenceError on a
 * non-finite result.
 */
BodyStated rk4_step(const BodyStated& state, const Vector3d& torque, double dt, const RigidBodyParamsd& params);

/// RK4 step with a zero-order hold on torque_fn(t, state), sampled once at the start of the step.
template <typename TorqueFn>
BodyStated rk4_step(const BodyStated& state, TorqueFn&& torque_fn, double t, double dt,
                    const RigidBodyParamsd& params)
{
  const Vector3d tau = torque_fn(t, state);
  return rk4_step(state, tau, dt, params);
}

/// q_m = (q + n1 nu)/|q + n1 nu|, omega_m = omega + n2 u with standard normal nu, u.
BodyStated apply_measurement_noise(const UnitQuaterniond& q, const Vector3d& omega, const NoiseScales& scales,
                                   std::mt19937_64& rng);

/// Owns the noise stream of one run. Scales are drawn uniformly on [0, cap).
class MeasurementNoise
{
 public:
  MeasurementNoise(const NoiseCaps& caps, std::uint64_t seed, bool redraw_scales = false);

  BodyStated apply(const BodyStated& truth);
  const NoiseScales& scales() const { return scales_; }

 private:
  void draw_scales();

  NoiseCaps caps_;
  bool redraw_;
  std::mt19937_64 rng_;
  NoiseScales scales_;
};

/// factor * M; factor must lie in [0.5, 1.5].
Matrix3d scale_inertia(const Matrix3d& inertia, double factor);

struct ScaledBody
{
  RigidBodyParamsd params;
  bool m0_clamped = false;
};

/// Scaled inertia with m0 re-clamped into the new eigenvalue bracket when needed.
ScaledBody scale_body(const RigidBodyParamsd& body, double factor);

SimTrace run_scenario(const SimConfig& config);

struct EnergyComparison
{
  double energy_a = 0.0;
  double energy_b = 0.0;
  int order = 0;  ///< -1: a lower, 0: equal, +1: b lower
};

/// Throws std::invalid_argument if the traces are not on the same time grid.
EnergyComparison compare_energy(const SimTrace& a, const SimTrace& b);

/// Earliest logged time after which metric(record) < threshold for the rest of the trace.
std::optional<double> settle_time(const SimTrace& trace, const std::function<double(const SimRecord&)>& metric,
                                  double threshold);

}  // namespace geosmc
