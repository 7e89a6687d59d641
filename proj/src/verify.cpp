#include "geosmc/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "geosmc/dynamics.hpp"
#include "geosmc/liegroup.hpp"
#include "geosmc/sim.hpp"

namespace geosmc::harness {

namespace {

class Property
{
 public:
  Property(std::string suite, std::string name, double tol) : result_{std::move(suite), std::move(name), 0, 0, 0.0, tol}
  {
  }

  void record(double error)
  {
    ++result_.samples;
    if (!(error <= result_.tol))
      ++result_.failures;
    if (std::isnan(error))
      result_.max_error = error;
    else if (!std::isnan(result_.max_error))
      result_.max_error = std::max(result_.max_error, error);
  }

  PropertyResult result() const { return result_; }

 private:
  PropertyResult result_;
};

// Max-abs difference scaled by the magnitude of the expected value (floored at 1).
template <typename A, typename B>
double rel_err(const Eigen::MatrixBase<A>& actual, const Eigen::MatrixBase<B>& expected)
{
  const double scale = std::max(1.0, expected.cwiseAbs().maxCoeff());
  return (actual - expected).cwiseAbs().maxCoeff() / scale;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m)
{
  return m.cwiseAbs().maxCoeff();
}

class Sampler
{
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  template <int N>
  Eigen::Matrix<double, N, 1> normal()
  {
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i)
      v(i) = normal_(rng_);
    return v;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  UnitQuaterniond unit() { return random_unit_quaternion<double>(rng_); }

  /// Random p with q^T p = 0.
  Vector4d tangent(const UnitQuaterniond& q)
  {
    const Vector4d v = normal<4>();
    return v - q.coeffs().dot(v) * q.coeffs();
  }

  TangentBundlePoint<double> point()
  {
    const UnitQuaterniond q = unit();
    return {q, tangent(q)};
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

double group_err(const TangentBundlePoint<double>& a, const TangentBundlePoint<double>& b)
{
  return std::max(max_abs(a.q.coeffs() - b.q.coeffs()), max_abs(a.p - b.p));
}

// One RK4 step of the Lagrangian form with tau held constant and bar_tau = J(x) tau / 2 re-evaluated per stage.
void lagrangian_rk4(Vector4d& x, Vector4d& xdot, const Vector3d& tau, double dt, const RigidBodyParamsd& params)
{
  auto accel = [&](const Vector4d& q, const Vector4d& qd) -> Vector4d {
    const Vector4d bar_tau = 0.5 * map_J(q) * tau;
    return mass_matrix(q, params).llt().solve(bar_tau - coriolis_matrix(q, qd, params) * qd);
  };
  const Vector4d k1x = xdot;
  const Vector4d k1v = accel(x, xdot);
  const Vector4d k2x = xdot + 0.5 * dt * k1v;
  const Vector4d k2v = accel(x + 0.5 * dt * k1x, k2x);
  const Vector4d k3x = xdot + 0.5 * dt * k2v;
  const Vector4d k3v = accel(x + 0.5 * dt * k2x, k3x);
  const Vector4d k4x = xdot + dt * k3v;
  const Vector4d k4v = accel(x + dt * k3x, k4x);
  x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  xdot += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  const double n = x.norm();
  x /= n;
  xdot -= x.dot(xdot) * x;
}

}  // namespace

std::vector<PropertyResult> verify_quat(const VerifyOptions& opts)
{
  constexpr double tol = 1e-10;
  const std::string suite = "quat";
  Sampler rng(opts.seed);

  Property j_anti(suite, "J(x)^T y = -J(y)^T x", tol);
  Property j_null(suite, "J(x)^T (k x) = 0", tol);
  Property j_gram(suite, "J(x)^T J(x) = |x|^2 I3", tol);
  Property l_anti(suite, "L(x)^T y = -L(y)^T x", tol);
  Property l_null(suite, "L(x)^T (k x) = 0", tol);
  Property l_gram(suite, "L(x)^T L(x) = |x|^2 I3", tol);
  Property q_outer(suite, "Q(y) Q(x)^T = J(y) J(x)^T + y x^T", tol);
  Property q_hom(suite, "Q(Q(x) y) = Q(x) Q(y)", tol);
  Property q_hom_t(suite, "Q(Q(x)^T y) = Q(x)^T Q(y)", tol);
  Property q_skew(suite, "Q([0, w]) is skew-symmetric", tol);
  Property qw_swap(suite, "Q(x) y = W(y) x", tol);
  Property qw_commute(suite, "Q(x) W(y) = W(y) Q(x)", tol);
  Property w_hom(suite, "W(Q(x) y) = W(y) W(x)", tol);
  Property q_orth(suite, "Q(q)^T Q(q) = I4 for unit q", tol);
  Property q_det(suite, "det Q(q) = 1 for unit q", tol);
  Property r_so3(suite, "R(q) in SO(3)", tol);
  Property r_hom(suite, "R(q1 q2) = R(q1) R(q2)", tol);

  for (std::size_t i = 0; i < opts.algebra_samples; ++i) {
    const Vector4d x = rng.normal<4>();
    const Vector4d y = rng.normal<4>();
    const Vector3d w = rng.normal<3>();
    const double k = rng.uniform(-10.0, 10.0);
    const double scale = std::max(1.0, std::abs(k) * x.squaredNorm());

    j_anti.record(rel_err(map_J(x).transpose() * y, -map_J(y).transpose() * x));
    j_null.record(max_abs(map_J(x).transpose() * (k * x)) / scale);
    j_gram.record(rel_err(map_J(x).transpose() * map_J(x), x.squaredNorm() * Matrix3d::Identity()));
    l_anti.record(rel_err(map_L(x).transpose() * y, -map_L(y).transpose() * x));
    l_null.record(max_abs(map_L(x).transpose() * (k * x)) / scale);
    l_gram.record(rel_err(map_L(x).transpose() * map_L(x), x.squaredNorm() * Matrix3d::Identity()));

    q_outer.record(rel_err(map_Q(y) * map_Q(x).transpose(),
                           map_J(y) * map_J(x).transpose() + y * x.transpose()));
    q_hom.record(rel_err(map_Q(Vector4d(map_Q(x) * y)), map_Q(x) * map_Q(y)));
    q_hom_t.record(rel_err(map_Q(Vector4d(map_Q(x).transpose() * y)), map_Q(x).transpose() * map_Q(y)));
    const Matrix4d qw = map_Q(Vector4d(0.0, w.x(), w.y(), w.z()));
    q_skew.record(max_abs(qw + qw.transpose()) / std::max(1.0, max_abs(qw)));
    qw_swap.record(rel_err(map_Q(x) * y, map_W(y) * x));
    qw_commute.record(rel_err(map_Q(x) * map_W(y), map_W(y) * map_Q(x)));
    w_hom.record(rel_err(map_W(Vector4d(map_Q(x) * y)), map_W(y) * map_W(x)));

    const UnitQuaterniond q1 = rng.unit();
    const UnitQuaterniond q2 = rng.unit();
    const Matrix4d qq = map_Q(q1);
    q_orth.record(max_abs(qq.transpose() * qq - Matrix4d::Identity()));
    q_det.record(std::abs(qq.determinant() - 1.0));
    const Matrix3d r = rodrigues(q1);
    r_so3.record(std::max(max_abs(r.transpose() * r - Matrix3d::Identity()), std::abs(r.determinant() - 1.0)));
    r_hom.record(max_abs(rodrigues(qmul(q1, q2)) - rodrigues(q1) * rodrigues(q2)));
  }

  std::vector<PropertyResult> out;
  for (const Property* p : {&j_anti, &j_null, &j_gram, &l_anti, &l_null, &l_gram, &q_outer, &q_hom, &q_hom_t,
                            &q_skew, &qw_swap, &qw_commute, &w_hom, &q_orth, &q_det, &r_so3, &r_hom})
    out.push_back(p->result());
  return out;
}

std::vector<PropertyResult> verify_liegroup(const VerifyOptions& opts)
{
  constexpr double axiom_tol = 1e-9;
  constexpr double closure_tol = 1e-10;
  const std::string suite = "liegroup";
  Sampler rng(opts.seed + 1);
  std::vector<PropertyResult> out;

  for (const double lambda : {0.1, 1.0, 10.0}) {
    const GroupParams<double> params(lambda);
    std::ostringstream tag;
    tag << " [lambda=" << lambda << "]";

    Property identity(suite, "two-sided identity" + tag.str(), axiom_tol);
    Property inverse(suite, "two-sided inverse" + tag.str(), axiom_tol);
    Property assoc(suite, "associativity" + tag.str(), axiom_tol);
    Property tangency(suite, "product stays tangent" + tag.str(), axiom_tol);
    Property projection(suite, "attitude part equals qmul" + tag.str(), 0.0);
    Property closed_op(suite, "subgroup closed under product" + tag.str(), closure_tol);
    Property closed_inv(suite, "subgroup closed under inverse" + tag.str(), closure_tol);

    const auto e = group_identity<double>();
    for (std::size_t i = 0; i < opts.algebra_samples; ++i) {
      const auto g1 = rng.point();
      const auto g2 = rng.point();
      const auto g3 = rng.point();

      identity.record(std::max(group_err(group_op(e, g1, params), g1), group_err(group_op(g1, e, params), g1)));
      const auto inv = group_inv(g1);
      inverse.record(std::max(group_err(group_op(g1, inv, params), e), group_err(group_op(inv, g1, params), e)));
      const auto g12 = group_op(g1, g2, params);
      assoc.record(group_err(group_op(g12, g3, params), group_op(g1, group_op(g2, g3, params), params)));
      tangency.record(std::abs(g12.q.coeffs().dot(g12.p)));
      projection.record(max_abs(g12.q.coeffs() - qmul(g1.q, g2.q).coeffs()));

      const auto h1 = project_to_subgroup(g1.q, params);
      const auto h2 = project_to_subgroup(g2.q, params);
      closed_op.record(sliding_var(group_op(h1, h2, params), params).norm());
      closed_inv.record(sliding_var(group_inv(h1), params).norm());
    }
    for (const Property* p : {&identity, &inverse, &assoc, &tangency, &projection, &closed_op, &closed_inv})
      out.push_back(p->result());
  }
  return out;
}

std::vector<PropertyResult> verify_dynamics(const VerifyOptions& opts)
{
  const std::string suite = "dynamics";
  const RigidBodyParamsd body = reference_body();
  const double lo = body.min_eigenvalue();
  const double hi = body.max_eigenvalue();
  Sampler rng(opts.seed + 2);

  Property bounds(suite, "lambda_min(M) <= eig D(q) <= lambda_max(M)", 1e-9);
  Property skew(suite, "x^T (Ddot - 2C) x = 0 (relative to |x|^2 |qdot| lambda_max)", 1e-6);
  Property err_rate(suite, "error rate matches finite difference of qe", 1e-6);

  for (std::size_t i = 0; i < opts.dynamics_samples; ++i) {
    const UnitQuaterniond q = rng.unit();
    const Eigen::SelfAdjointEigenSolver<Matrix4d> eig(mass_matrix(q, body), Eigen::EigenvaluesOnly);
    bounds.record(std::max({0.0, lo - eig.eigenvalues()(0), eig.eigenvalues()(3) - hi}));

    const Vector4d qdot = rng.tangent(q);
    const Vector4d x = rng.normal<4>();
    constexpr double h = 1e-6;
    const Matrix4d d_dot =
        (mass_matrix(Vector4d(q.coeffs() + h * qdot), body) - mass_matrix(Vector4d(q.coeffs() - h * qdot), body)) /
        (2.0 * h);
    const double form = x.dot((d_dot - 2.0 * coriolis_matrix(q, qdot, body)) * x);
    skew.record(std::abs(form) / (x.squaredNorm() * qdot.norm() * hi));

    const DesiredTrajectorySampled d0 = make_desired(rng.unit(), rng.normal<3>(), Vector3d::Zero().eval());
    const GroupParams<double> group(0.1);
    const ErrorStated err = error_state(LagrangianStated{q, qdot}, d0, group);
    auto qe_at = [&](double t) -> Vector4d {
      const UnitQuaterniond qt(Vector4d((q.coeffs() + t * qdot).normalized()));
      const DesiredTrajectorySampled dt = constant_rate_trajectory(d0.omegad, d0.qd, t);
      return map_Q(dt.qd).transpose() * qt.coeffs();
    };
    constexpr double fd = 1e-5;
    err_rate.record(max_abs((qe_at(fd) - qe_at(-fd)) / (2.0 * fd) - err.qedot));
  }

  // Model equivalence and free-body energy over 10 s at dt = 1e-3.
  Property equiv_q(suite, "Euler and Lagrangian forms agree in attitude over 10 s", 1e-6);
  Property equiv_w(suite, "Euler and Lagrangian forms agree in rate over 10 s", 1e-5);
  Property energy(suite, "free-body kinetic energy conserved over 10 s", 1e-8);
  constexpr double dt = 1e-3;
  constexpr int steps = 10000;
  const std::size_t runs = std::max<std::size_t>(1, opts.dynamics_samples / 200);
  for (std::size_t r = 0; r < runs; ++r) {
    const BodyStated start{rng.unit(), 0.5 * rng.normal<3>()};
    const Vector3d amp = rng.normal<3>();
    const Vector3d freq = rng.normal<3>().cwiseAbs() + Vector3d::Constant(0.2);
    auto tau_at = [&](double t) -> Vector3d {
      return Vector3d(amp.x() * std::sin(freq.x() * t), amp.y() * std::cos(freq.y() * t),
                      amp.z() * std::sin(freq.z() * t + 0.3));
    };

    BodyStated euler = start;
    Vector4d x = start.q.coeffs();
    Vector4d xdot = omega_to_qdot(start.q, start.omega);
    double dq = 0.0;
    double dw = 0.0;
    for (int k = 0; k < steps; ++k) {
      const Vector3d tau = tau_at(k * dt);
      euler = rk4_step(euler, tau, dt, body);
      lagrangian_rk4(x, xdot, tau, dt, body);
      dq = std::max(dq, (euler.q.coeffs() - x).norm());
      dw = std::max(dw, (euler.omega - 2.0 * map_J(x).transpose() * xdot).norm());
    }
    equiv_q.record(dq);
    equiv_w.record(dw);

    BodyStated free = start;
    auto kinetic = [&](const BodyStated& s) { return 0.5 * s.omega.dot(body.inertia() * s.omega); };
    const double e0 = kinetic(free);
    double drift = 0.0;
    for (int k = 0; k < steps; ++k) {
      free = rk4_step(free, Vector3d::Zero().eval(), dt, body);
      drift = std::max(drift, std::abs(kinetic(free) - e0) / e0);
    }
    energy.record(drift);
  }

  std::vector<PropertyResult> out;
  for (const Property* p : {&bounds, &skew, &err_rate, &equiv_q, &equiv_w, &energy})
    out.push_back(p->result());
  return out;
}

const std::vector<std::string>& suite_names()
{
  static const std::vector<std::string> names = {"quat", "liegroup", "dynamics"};
  return names;
}

std::vector<PropertyResult> verify_suite(const std::string& suite, const VerifyOptions& opts)
{
  if (suite == "quat")
    return verify_quat(opts);
  if (suite == "liegroup")
    return verify_liegroup(opts);
  if (suite == "dynamics")
    return verify_dynamics(opts);
  throw std::invalid_argument("unknown verification suite '" + suite + "'");
}

std::string format_results(const std::vector<PropertyResult>& results)
{
  std::ostringstream out;
  for (const auto& r : results) {
    out << (r.passed() ? "PASS " : "FAIL ") << std::left << std::setw(10) << r.suite << std::setw(62) << r.name
        << std::right << std::setw(6) << (r.samples - r.failures) << '/' << std::left << std::setw(6) << r.samples
        << " max_err=" << std::scientific << std::setprecision(2) << r.max_error << " tol=" << r.tol << '\n';
  }
  return out.str();
}

}  // namespace geosmc::harness
