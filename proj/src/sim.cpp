#include "geosmc/sim.hpp"

#include <algorithm>
#include <cmath>

namespace geosmc {

std::string_view to_string(Scenario s)
{
  switch (s) {
    case Scenario::Ideal: return "ideal";
    case Scenario::UncertainInertia: return "uncertain_inertia";
    case Scenario::Noisy: return "noisy";
  }
  return "unknown";
}

std::string_view to_string(ControllerKind c)
{
  switch (c) {
    case ControllerKind::Geometric: return "geometric";
    case ControllerKind::Baseline: return "baseline";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name)
{
  if (name == "ideal") return Scenario::Ideal;
  if (name == "uncertain_inertia" || name == "uncertain") return Scenario::UncertainInertia;
  if (name == "noisy") return Scenario::Noisy;
  return std::nullopt;
}

std::optional<ControllerKind> parse_controller(std::string_view name)
{
  if (name == "geometric") return ControllerKind::Geometric;
  if (name == "baseline") return ControllerKind::Baseline;
  return std::nullopt;
}

UnitQuaterniond reference_initial_attitude()
{
  const Vector3d u = Vector3d(1.0, 2.0, 3.0).normalized();
  return UnitQuaterniond(0.0, u.x(), u.y(), u.z());
}

void SimConfig::validate() const
{
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("dt must be positive");
  if (!(t_end >= dt))
    throw std::invalid_argument("t_end must be at least dt");
  if (!(log_rate > 0.0))
    throw std::invalid_argument("log_rate must be positive");
  if (log_rate * dt > 1.0 + 1e-9)
    throw std::invalid_argument("log_rate exceeds the integration rate 1/dt");
  if (!(noise.quaternion >= 0.0) || !(noise.rate >= 0.0))
    throw std::invalid_argument("noise caps must be non-negative");
  if (!(inertia_scale >= 0.5 && inertia_scale <= 1.5))
    throw std::invalid_argument("inertia_scale must lie in [0.5, 1.5]");
  if (!initial.omega.allFinite() || !omegad.allFinite())
    throw std::invalid_argument("initial rates must be finite");
}

std::int64_t SimConfig::steps() const { return std::llround(t_end / dt); }

std::int64_t SimConfig::log_stride() const { return std::max<std::int64_t>(1, std::llround(1.0 / (log_rate * dt))); }

BodyRate body_rate(const UnitQuaterniond& q, const Vector3d& omega, const Vector3d& tau,
                   const RigidBodyParamsd& params)
{
  return {omega_to_qdot(q, omega), euler_accel(BodyStated{q, omega}, tau, params)};
}

namespace {

// Stage derivative at an ambient (not renormalized) quaternion.
BodyRate stage_rate(const Vector4d& q, const Vector3d& omega, const Vector3d& tau, const RigidBodyParamsd& params)
{
  const Vector3d h = params.inertia() * omega;
  return {0.5 * map_J(q) * omega, params.inertia_inverse() * (h.cross(omega) + tau)};
}

}  // namespace

BodyStated rk4_step(const BodyStated& state, const Vector3d& torque, double dt, const RigidBodyParamsd& params)
{
  const Vector4d& q = state.q.coeffs();
  const Vector3d& w = state.omega;

  const BodyRate k1 = stage_rate(q, w, torque, params);
  const BodyRate k2 = stage_rate(q + 0.5 * dt * k1.qdot, w + 0.5 * dt * k1.omega_dot, torque, params);
  const BodyRate k3 = stage_rate(q + 0.5 * dt * k2.qdot, w + 0.5 * dt * k2.omega_dot, torque, params);
  const BodyRate k4 = stage_rate(q + dt * k3.qdot, w + dt * k3.omega_dot, torque, params);

  const Vector4d q_next = q + dt / 6.0 * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
  const Vector3d w_next = w + dt / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);
  if (!q_next.allFinite() || !w_next.allFinite() || q_next.norm() < 1e-9)
    throw DivergenceError("rk4_step: non-finite state");

  return {UnitQuaterniond(Vector4d(q_next.normalized())), w_next};
}

BodyStated apply_measurement_noise(const UnitQuaterniond& q, const Vector3d& omega, const NoiseScales& scales,
                                   std::mt19937_64& rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  BodyStated out{q, omega};
  if (scales.quaternion > 0.0) {
    for (int attempt = 0;; ++attempt) {
      Vector4d nu;
      for (int i = 0; i < 4; ++i)
        nu(i) = normal(rng);
      const Vector4d perturbed = q.coeffs() + scales.quaternion * nu;
      if (perturbed.norm() >= 1e-9) {
        out.q = UnitQuaterniond(Vector4d(perturbed.normalized()));
        break;
      }
      if (attempt > 16)
        throw DivergenceError("apply_measurement_noise: cannot renormalize perturbed quaternion");
    }
  }
  if (scales.rate > 0.0) {
    Vector3d u;
    for (int i = 0; i < 3; ++i)
      u(i) = normal(rng);
    out.omega = omega + scales.rate * u;
  }
  return out;
}

MeasurementNoise::MeasurementNoise(const NoiseCaps& caps, std::uint64_t seed, bool redraw_scales)
    : caps_(caps), redraw_(redraw_scales), rng_(seed)
{
  draw_scales();
}

void MeasurementNoise::draw_scales()
{
  auto draw = [this](double cap) {
    if (cap <= 0.0)
      return 0.0;
    return std::uniform_real_distribution<double>(0.0, cap)(rng_);
  };
  scales_.quaternion = draw(caps_.quaternion);
  scales_.rate = draw(caps_.rate);
}

BodyStated MeasurementNoise::apply(const BodyStated& truth)
{
  if (redraw_)
    draw_scales();
  return apply_measurement_noise(truth.q, truth.omega, scales_, rng_);
}

Matrix3d scale_inertia(const Matrix3d& inertia, double factor)
{
  if (!(factor >= 0.5 && factor <= 1.5))
    throw std::invalid_argument("scale_inertia: factor must lie in [0.5, 1.5]");
  return factor * inertia;
}

ScaledBody scale_body(const RigidBodyParamsd& body, double factor)
{
  const Matrix3d scaled = scale_inertia(body.inertia(), factor);
  const Eigen::SelfAdjointEigenSolver<Matrix3d> eig(scaled, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(2);
  const double m0 = std::clamp(body.m0(), lo, hi);
  return {RigidBodyParamsd(scaled, m0), m0 != body.m0()};
}

namespace {

class Controller
{
 public:
  Controller(const SimConfig& config, const RigidBodyParamsd& model) : config_(config), model_(model) {}

  Vector3d torque(const BodyStated& measured, const DesiredTrajectorySampled& desired) const
  {
    const LagrangianStated state = to_lagrangian(measured);
    if (config_.controller == ControllerKind::Geometric) {
      const ErrorStated err = error_state(state, desired, config_.geometric.group);
      return geometric_tracking_control(err, config_.geometric, desired, model_);
    }
    return baseline_tracking_control(state, desired, config_.baseline, model_);
  }

  Vector4d sliding(const BodyStated& truth, const DesiredTrajectorySampled& desired) const
  {
    const LagrangianStated state = to_lagrangian(truth);
    if (config_.controller == ControllerKind::Geometric)
      return tracking_sliding_var(error_state(state, desired, config_.geometric.group), config_.geometric);
    return sliding_var_s0(state, desired, config_.baseline);
  }

 private:
  const SimConfig& config_;
  RigidBodyParamsd model_;
};

}  // namespace

SimTrace run_scenario(const SimConfig& config)
{
  config.validate();

  SimTrace trace;
  trace.config = config;

  RigidBodyParamsd model = config.plant;
  if (config.scenario == Scenario::UncertainInertia) {
    const ScaledBody scaled = scale_body(config.plant, config.inertia_scale);
    model = scaled.params;
    trace.m0_clamped = scaled.m0_clamped;
  }
  const Controller controller(config, model);

  std::optional<MeasurementNoise> noise;
  if (config.scenario == Scenario::Noisy) {
    noise.emplace(config.noise, config.seed, config.redraw_noise_scales);
    trace.noise = noise->scales();
  }

  const std::int64_t steps = config.steps();
  const std::int64_t stride = config.log_stride();
  trace.records.reserve(static_cast<std::size_t>(steps / stride + 1));

  BodyStated state = config.initial;
  double energy_sq = 0.0;
  try {
    for (std::int64_t k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * config.dt;
      const DesiredTrajectorySampled desired = constant_rate_trajectory(config.omegad, config.qd0, t);
      const BodyStated measured = noise ? noise->apply(state) : state;
      const Vector3d tau = controller.torque(measured, desired);
      if (!tau.allFinite())
        throw DivergenceError("controller produced a non-finite torque at t = " + std::to_string(t));

      if (k % stride == 0) {
        SimRecord r;
        r.t = t;
        r.q = state.q.coeffs();
        r.omega = state.omega;
        r.qd = desired.qd.coeffs();
        r.omegad = desired.omegad;
        r.qe = map_Q(desired.qd).transpose() * state.q.coeffs();
        r.s = controller.sliding(state, desired);
        r.tau = tau;
        r.err_norm = (r.qe - unit_one<double>()).norm();
        r.s_norm = r.s.norm();
        r.tau_norm = tau.norm();
        if (!trace.records.empty()) {
          const SimRecord& prev = trace.records.back();
          energy_sq += 0.5 * (prev.tau.squaredNorm() + tau.squaredNorm()) * (t - prev.t);
        }
        r.energy = std::sqrt(energy_sq);
        trace.records.push_back(r);
      }
      if (k == steps)
        break;
      state = rk4_step(state, tau, config.dt, config.plant);
    }
  } catch (const DivergenceError& e) {
    trace.diverged = true;
    trace.error = e.what();
  }
  return trace;
}

EnergyComparison compare_energy(const SimTrace& a, const SimTrace& b)
{
  if (a.records.empty() || b.records.empty())
    throw std::invalid_argument("compare_energy: empty trace");
  if (a.records.size() != b.records.size())
    throw std::invalid_argument("compare_energy: traces have different lengths");
  for (std::size_t i = 0; i < a.records.size(); ++i)
    if (a.records[i].t != b.records[i].t)
      throw std::invalid_argument("compare_energy: traces are on different time grids");

  EnergyComparison c;
  c.energy_a = a.records.back().energy;
  c.energy_b = b.records.back().energy;
  c.order = c.energy_a < c.energy_b ? -1 : (c.energy_b < c.energy_a ? 1 : 0);
  return c;
}

std::optional<double> settle_time(const SimTrace& trace, const std::function<double(const SimRecord&)>& metric,
                                  double threshold)
{
  const auto& recs = trace.records;
  if (recs.empty() || !(metric(recs.back()) < threshold))
    return std::nullopt;
  std::size_t i = recs.size() - 1;
  while (i > 0 && metric(recs[i - 1]) < threshold)
    --i;
  return recs[i].t;
}

}  // namespace geosmc
