#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "geosmc/liegroup.hpp"
#include "geosmc/quat.hpp"

namespace geosmc {

/**
 * \brief Inertia tensor M and virtual inertia m0 of the rigid body.
 *
 * Construction validates M = M^T (to 1e-12), M > 0, and
 * lambda_min(M) <= m0 <= lambda_max(M); violations throw std::invalid_argument.
 */
template <typename Scalar>
class RigidBodyParams
{
 public:
  RigidBodyParams(const Matrix3<Scalar>& inertia, Scalar m0) : inertia_(inertia), m0_(m0)
  {
    if (!inertia.allFinite() || !std::isfinite(static_cast<double>(m0)))
      throw std::invalid_argument("RigidBodyParams: non-finite inertia");
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12))
      throw std::invalid_argument("RigidBodyParams: inertia tensor is not symmetric");
    const Eigen::SelfAdjointEigenSolver<Matrix3<Scalar>> eig(inertia, Eigen::EigenvaluesOnly);
    eig_min_ = eig.eigenvalues()(0);
    eig_max_ = eig.eigenvalues()(2);
    if (!(eig_min_ > Scalar(0)))
      throw std::invalid_argument("RigidBodyParams: inertia tensor is not positive definite");
    if (m0 < eig_min_ || m0 > eig_max_)
      throw std::invalid_argument("RigidBodyParams: virtual inertia m0 outside [lambda_min(M), lambda_max(M)]");
    inertia_inv_ = inertia.ldlt().solve(Matrix3<Scalar>::Identity());
  }

  const Matrix3<Scalar>& inertia() const { return inertia_; }
  const Matrix3<Scalar>& inertia_inverse() const { return inertia_inv_; }
  Scalar m0() const { return m0_; }
  Scalar min_eigenvalue() const { return eig_min_; }
  Scalar max_eigenvalue() const { return eig_max_; }

 private:
  Matrix3<Scalar> inertia_;
  Matrix3<Scalar> inertia_inv_;
  Scalar m0_;
  Scalar eig_min_{};
  Scalar eig_max_{};
};

using RigidBodyParamsd = RigidBodyParams<double>;

/// Reference spacecraft inertia (kg m^2) used by the comparison scenarios.
inline Matrix3d reference_inertia()
{
  Matrix3d m;
  m << 3.6046, -0.0706, 0.1491,
       -0.0706, 8.6868, 0.0449,
       0.1491, 0.0449, 9.3484;
  return m;
}

inline constexpr double kReferenceVirtualInertia = 6.0;

inline RigidBodyParamsd reference_body() { return {reference_inertia(), kReferenceVirtualInertia}; }

template <typename Scalar>
struct BodyState
{
  UnitQuaternion<Scalar> q;
  Vector3<Scalar> omega = Vector3<Scalar>::Zero();
};

template <typename Scalar>
struct LagrangianState
{
  UnitQuaternion<Scalar> q;
  Vector4<Scalar> qdot = Vector4<Scalar>::Zero();
};

template <typename Scalar>
struct ErrorState
{
  UnitQuaternion<Scalar> qe;
  Vector4<Scalar> qedot = Vector4<Scalar>::Zero();
  Vector3<Scalar> omega_e = Vector3<Scalar>::Zero();
  Vector4<Scalar> pe = Vector4<Scalar>::Zero();
};

/// Desired attitude, rates, and the quaternion derivatives they induce.
template <typename Scalar>
struct DesiredTrajectorySample
{
  UnitQuaternion<Scalar> qd;
  Vector3<Scalar> omegad = Vector3<Scalar>::Zero();
  Vector3<Scalar> omegad_dot = Vector3<Scalar>::Zero();
  Vector4<Scalar> qd_dot = Vector4<Scalar>::Zero();   ///< J(qd) omegad / 2
  Vector4<Scalar> qd_ddot = Vector4<Scalar>::Zero();  ///< (J(qd) omegad_dot + J(qd_dot) omegad) / 2
};

using BodyStated = BodyState<double>;
using LagrangianStated = LagrangianState<double>;
using ErrorStated = ErrorState<double>;
using DesiredTrajectorySampled = DesiredTrajectorySample<double>;

/// qdot = J(q) omega / 2.
template <typename Scalar>
Vector4<Scalar> omega_to_qdot(const UnitQuaternion<Scalar>& q, const Vector3<Scalar>& omega)
{
  return Scalar(0.5) * map_J(q) * omega;
}

/// omega = 2 J(q)^T qdot. Throws TangencyError if qdot is not tangent at q.
template <typename Scalar>
Vector3<Scalar> qdot_to_omega(const UnitQuaternion<Scalar>& q, const Vector4<Scalar>& qdot)
{
  require_tangent(q, qdot, "qdot_to_omega");
  return Scalar(2) * map_J(q).transpose() * qdot;
}

template <typename Scalar>
LagrangianState<Scalar> to_lagrangian(const BodyState<Scalar>& s)
{
  return {s.q, omega_to_qdot(s.q, s.omega)};
}

template <typename Scalar>
BodyState<Scalar> to_body(const LagrangianState<Scalar>& s)
{
  return {s.q, qdot_to_omega(s.q, s.qdot)};
}

/// Euler's equation solved for the angular acceleration: M^-1((M w)^ w + tau).
template <typename Scalar>
Vector3<Scalar> euler_accel(const BodyState<Scalar>& state, const Vector3<Scalar>& tau,
                            const RigidBodyParams<Scalar>& params)
{
  const Vector3<Scalar> h = params.inertia() * state.omega;
  return params.inertia_inverse() * (h.cross(state.omega) + tau);
}

/// D(x) = J(x) M J(x)^T + m0 x x^T, evaluated for any ambient x.
template <typename Derived>
Matrix4<typename Derived::Scalar> mass_matrix(const Eigen::MatrixBase<Derived>& x,
                                              const RigidBodyParams<typename Derived::Scalar>& params)
{
  const auto j = map_J(x);
  return j * params.inertia() * j.transpose() + params.m0() * x * x.transpose();
}

template <typename Scalar>
Matrix4<Scalar> mass_matrix(const UnitQuaternion<Scalar>& q, const RigidBodyParams<Scalar>& params)
{
  return mass_matrix(q.coeffs(), params);
}

/// C = -J(x) hat(w) J(x)^T - D(x) Q(xdot) Q(x)^T for a given body momentum-like vector w and ambient x.
template <typename Scalar>
Matrix4<Scalar> coriolis_with_momentum(const Vector4<Scalar>& x, const Vector4<Scalar>& xdot,
                                       const Vector3<Scalar>& w, const RigidBodyParams<Scalar>& params)
{
  const Matrix43<Scalar> j = map_J(x);
  return -j * hat(w) * j.transpose() - mass_matrix(x, params) * map_Q(xdot) * map_Q(x).transpose();
}

template <typename Scalar>
Matrix4<Scalar> coriolis_with_momentum(const UnitQuaternion<Scalar>& q, const Vector4<Scalar>& qdot,
                                       const Vector3<Scalar>& w, const RigidBodyParams<Scalar>& params)
{
  return coriolis_with_momentum(q.coeffs(), qdot, w, params);
}

/// C(x, xdot) with w = M omega and omega = 2 J(x)^T xdot, for ambient x.
template <typename Scalar>
Matrix4<Scalar> coriolis_matrix(const Vector4<Scalar>& x, const Vector4<Scalar>& xdot,
                                const RigidBodyParams<Scalar>& params)
{
  const Vector3<Scalar> omega = Scalar(2) * map_J(x).transpose() * xdot;
  return coriolis_with_momentum(x, xdot, Vector3<Scalar>(params.inertia() * omega), params);
}

template <typename Scalar>
Matrix4<Scalar> coriolis_matrix(const UnitQuaternion<Scalar>& q, const Vector4<Scalar>& qdot,
                                const RigidBodyParams<Scalar>& params)
{
  return coriolis_matrix(q.coeffs(), qdot, params);
}

/// qddot = D(q)^-1 (bar_tau - C(q, qdot) qdot).
template <typename Scalar>
Vector4<Scalar> lagrangian_accel(const LagrangianState<Scalar>& state, const Vector4<Scalar>& bar_tau,
                                 const RigidBodyParams<Scalar>& params)
{
  const Matrix4<Scalar> d = mass_matrix(state.q, params);
  const Matrix4<Scalar> c = coriolis_matrix(state.q, state.qdot, params);
  return d.llt().solve(bar_tau - c * state.qdot);
}

/// bar_tau = J(q) tau / 2.
template <typename Scalar>
Vector4<Scalar> tau_to_bar_tau(const UnitQuaternion<Scalar>& q, const Vector3<Scalar>& tau)
{
  return Scalar(0.5) * map_J(q) * tau;
}

/// tau = 2 J(q)^T bar_tau. Any component of bar_tau along q is discarded.
template <typename Scalar>
Vector3<Scalar> bar_tau_to_tau(const UnitQuaternion<Scalar>& q, const Vector4<Scalar>& bar_tau)
{
  return Scalar(2) * map_J(q).transpose() * bar_tau;
}

/// Completes a desired sample from attitude, rate, and rate derivative.
template <typename Scalar>
DesiredTrajectorySample<Scalar> make_desired(const UnitQuaternion<Scalar>& qd, const Vector3<Scalar>& omegad,
                                             const Vector3<Scalar>& omegad_dot)
{
  DesiredTrajectorySample<Scalar> d;
  d.qd = qd;
  d.omegad = omegad;
  d.omegad_dot = omegad_dot;
  d.qd_dot = omega_to_qdot(qd, omegad);
  d.qd_ddot = Scalar(0.5) * (map_J(qd) * omegad_dot + map_J(d.qd_dot) * omegad);
  return d;
}

/// Closed-form attitude under a constant body rate: qd(t) = qd0 * exp(omegad t / 2).
template <typename Scalar>
DesiredTrajectorySample<Scalar> constant_rate_trajectory(const Vector3<Scalar>& omegad,
                                                         const UnitQuaternion<Scalar>& qd0, Scalar t)
{
  const UnitQuaternion<Scalar> qd = qmul(qd0, axis_angle(Vector3<Scalar>(omegad * t)));
  return make_desired(qd, omegad, Vector3<Scalar>::Zero().eval());
}

/**
 * Intrinsic tracking error g_e = g_d^-1 g for g = (q, qdot), g_d = (qd, qd_dot).
 *
 *   qe     = Q(qd)^T q
 *   qedot  = Q(qd^-1) qdot + W(q) conj(qd_dot)
 *   omega_e = omega - R(qe)^T omegad
 *   pe     = qedot + lambda Q(qd^-1)(q0 q - 1) + lambda W(q)(qd0 qd^-1 - 1)
 *            - lambda ((qd^T q) Q(qd^-1) q - 1)
 */
template <typename Scalar>
ErrorState<Scalar> error_state(const LagrangianState<Scalar>& state, const DesiredTrajectorySample<Scalar>& desired,
                               const GroupParams<Scalar>& params)
{
  const Scalar lambda = params.lambda();
  const Vector4<Scalar> one = unit_one<Scalar>();
  const Vector4<Scalar>& q = state.q.coeffs();
  const Vector4<Scalar> qd_inv = conjugate(desired.qd.coeffs());
  const Matrix4<Scalar> Qdi = map_Q(qd_inv);
  const Matrix4<Scalar> Wq = map_W(q);

  ErrorState<Scalar> e;
  const Vector4<Scalar> qe_raw = Qdi * q;
  e.qe = UnitQuaternion<Scalar>(qe_raw);
  e.qedot = Qdi * state.qdot + Wq * conjugate(desired.qd_dot);

  const Vector3<Scalar> omega = Scalar(2) * map_J(q).transpose() * state.qdot;
  e.omega_e = omega - rodrigues(e.qe).transpose() * desired.omegad;

  e.pe = e.qedot + lambda * (Qdi * (q(0) * q - one)) + lambda * (Wq * (qd_inv(0) * qd_inv - one)) -
         lambda * (desired.qd.coeffs().dot(q) * qe_raw - one);
  return e;
}

/// D(qe): the error system shares the plant's mass matrix.
template <typename Scalar>
Matrix4<Scalar> error_mass_matrix(const UnitQuaternion<Scalar>& qe, const RigidBodyParams<Scalar>& params)
{
  return mass_matrix(qe, params);
}

/// w_r = M omega_e - (tr(M) I - 2 M) R(qe)^T omegad.
template <typename Scalar>
Vector3<Scalar> error_momentum(const UnitQuaternion<Scalar>& qe, const Vector3<Scalar>& omega_e,
                               const DesiredTrajectorySample<Scalar>& desired, const RigidBodyParams<Scalar>& params)
{
  const Matrix3<Scalar>& m = params.inertia();
  const Matrix3<Scalar> mix = m.trace() * Matrix3<Scalar>::Identity() - Scalar(2) * m;
  return m * omega_e - mix * (rodrigues(qe).transpose() * desired.omegad);
}

/// C(qe, qedot) = -J(qe) hat(w_r) J(qe)^T - D(qe) Q(qedot) Q(qe)^T.
template <typename Scalar>
Matrix4<Scalar> error_coriolis(const UnitQuaternion<Scalar>& qe, const Vector4<Scalar>& qedot,
                               const Vector3<Scalar>& omega_e, const DesiredTrajectorySample<Scalar>& desired,
                               const RigidBodyParams<Scalar>& params)
{
  return coriolis_with_momentum(qe, qedot, error_momentum(qe, omega_e, desired, params), params);
}

/**
 * Recovers the body torque from the error-system input
 *   tau_c = hat(M R^T omegad) R^T omegad - M R^T omegad_dot + tau,   R = R(qe).
 */
template <typename Scalar>
Vector3<Scalar> tau_from_tau_c(const Vector3<Scalar>& tau_c, const UnitQuaternion<Scalar>& qe,
                               const DesiredTrajectorySample<Scalar>& desired, const RigidBodyParams<Scalar>& params)
{
  const Matrix3<Scalar> rt = rodrigues(qe).transpose();
  const Vector3<Scalar> wd_body = rt * desired.omegad;
  const Vector3<Scalar> h = params.inertia() * wd_body;
  return tau_c - h.cross(wd_body) + params.inertia() * (rt * desired.omegad_dot);
}

}  // namespace geosmc
