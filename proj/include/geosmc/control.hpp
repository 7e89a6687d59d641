#pragma once

#include <stdexcept>
#include <string>

#include "geosmc/dynamics.hpp"
#include "geosmc/liegroup.hpp"

namespace geosmc {

namespace detail {

template <typename Scalar>
void require_spd(const Matrix4<Scalar>& m, const char* name)
{
  if (!m.allFinite())
    throw std::invalid_argument(std::string(name) + " has non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12))
    throw std::invalid_argument(std::string(name) + " is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix4<Scalar>> eig(m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()(0) > Scalar(0)))
    throw std::invalid_argument(std::string(name) + " is not positive definite");
}

}  // namespace detail

/// Gains of the sliding-subgroup controllers: lambda (shared with the group law) and K_r.
template <typename Scalar>
struct GeometricGains
{
  GeometricGains(const GroupParams<Scalar>& group_, const Matrix4<Scalar>& kr_,
                 SlidingSign sign_ = SlidingSign::Unsigned)
      : group(group_), kr(kr_), sign(sign_)
  {
    detail::require_spd(kr, "K_r");
  }

  Scalar lambda() const { return group.lambda(); }

  GroupParams<Scalar> group;
  Matrix4<Scalar> kr;
  SlidingSign sign;
};

/// Gains of the Euclidean baseline built on s0 = qdot - qd_dot + Lambda (q - qd).
template <typename Scalar>
struct BaselineGains
{
  BaselineGains(const Matrix4<Scalar>& lambda_, const Matrix4<Scalar>& ks_) : lambda(lambda_), ks(ks_)
  {
    detail::require_spd(lambda, "Lambda");
    detail::require_spd(ks, "K_s");
  }

  Matrix4<Scalar> lambda;
  Matrix4<Scalar> ks;
};

using GeometricGainsd = GeometricGains<double>;
using BaselineGainsd = BaselineGains<double>;

inline GeometricGainsd default_geometric_gains()
{
  return {GroupParams<double>(0.1), 3.0 * Matrix4d::Identity()};
}

inline BaselineGainsd default_baseline_gains()
{
  return {0.1 * Matrix4d::Identity(), 3.0 * Matrix4d::Identity()};
}

namespace detail {

// -lambda (D (q0 qdot + qdot0 q) + C (q0 q - 1)) - K_r s, with lambda already signed.
template <typename Scalar>
Vector4<Scalar> sliding_law(const UnitQuaternion<Scalar>& q, const Vector4<Scalar>& qdot, const Matrix4<Scalar>& d,
                            const Matrix4<Scalar>& c, Scalar lambda, const Matrix4<Scalar>& kr)
{
  const Vector4<Scalar>& x = q.coeffs();
  const Vector4<Scalar> offset = x(0) * x - unit_one<Scalar>();
  const Vector4<Scalar> s = qdot + lambda * offset;
  const Vector4<Scalar> offset_rate = x(0) * qdot + qdot(0) * x;
  return -lambda * (d * offset_rate + c * offset) - kr * s;
}

}  // namespace detail

/// Reaching law driving (q, qdot) onto the sliding subgroup; returns bar_tau in R^4.
template <typename Scalar>
Vector4<Scalar> reaching_control(const LagrangianState<Scalar>& state, const GeometricGains<Scalar>& gains,
                                 const RigidBodyParams<Scalar>& params)
{
  const Scalar lambda = signed_lambda(state.q, gains.lambda(), gains.sign);
  return detail::sliding_law(state.q, state.qdot, mass_matrix(state.q, params),
                             coriolis_matrix(state.q, state.qdot, params), lambda, gains.kr);
}

/// Sliding variable of the error system, s(qe, qedot).
template <typename Scalar>
Vector4<Scalar> tracking_sliding_var(const ErrorState<Scalar>& err, const GeometricGains<Scalar>& gains)
{
  return sliding_var(TangentBundlePoint<Scalar>{err.qe, err.qedot}, gains.group, gains.sign);
}

/// Error-system input bar_tau_c of the geometric tracking law.
template <typename Scalar>
Vector4<Scalar> geometric_tracking_bar_tau_c(const ErrorState<Scalar>& err, const GeometricGains<Scalar>& gains,
                                             const DesiredTrajectorySample<Scalar>& desired,
                                             const RigidBodyParams<Scalar>& params)
{
  const Scalar lambda = signed_lambda(err.qe, gains.lambda(), gains.sign);
  return detail::sliding_law(err.qe, err.qedot, error_mass_matrix(err.qe, params),
                             error_coriolis(err.qe, err.qedot, err.omega_e, desired, params), lambda, gains.kr);
}

/// Geometric tracking torque: bar_tau_c -> tau_c = 2 J(qe)^T bar_tau_c -> body torque tau.
template <typename Scalar>
Vector3<Scalar> geometric_tracking_control(const ErrorState<Scalar>& err, const GeometricGains<Scalar>& gains,
                                           const DesiredTrajectorySample<Scalar>& desired,
                                           const RigidBodyParams<Scalar>& params)
{
  const Vector4<Scalar> bar_tau_c = geometric_tracking_bar_tau_c(err, gains, desired, params);
  const Vector3<Scalar> tau_c = bar_tau_to_tau(err.qe, bar_tau_c);
  return tau_from_tau_c(tau_c, err.qe, desired, params);
}

/// s0 = qdot - qd_dot + Lambda (q - qd), in ambient R^4.
template <typename Scalar>
Vector4<Scalar> sliding_var_s0(const LagrangianState<Scalar>& state, const DesiredTrajectorySample<Scalar>& desired,
                               const BaselineGains<Scalar>& gains)
{
  return state.qdot - desired.qd_dot + gains.lambda * (state.q.coeffs() - desired.qd.coeffs());
}

/**
 * Euclidean computed-torque sliding controller on s0:
 *   bar_tau = D(q)(qd_ddot - Lambda(qdot - qd_dot)) + C(q, qdot)(qd_dot - Lambda(q - qd)) - K_s s0,
 *   tau = 2 J(q)^T bar_tau.
 */
template <typename Scalar>
Vector3<Scalar> baseline_tracking_control(const LagrangianState<Scalar>& state,
                                          const DesiredTrajectorySample<Scalar>& desired,
                                          const BaselineGains<Scalar>& gains, const RigidBodyParams<Scalar>& params)
{
  const Vector4<Scalar> s0 = sliding_var_s0(state, desired, gains);
  const Vector4<Scalar> ref_rate = desired.qd_dot - gains.lambda * (state.q.coeffs() - desired.qd.coeffs());
  const Vector4<Scalar> ref_accel = desired.qd_ddot - gains.lambda * (state.qdot - desired.qd_dot);
  const Vector4<Scalar> bar_tau = mass_matrix(state.q, params) * ref_accel +
                                  coriolis_matrix(state.q, state.qdot, params) * ref_rate - gains.ks * s0;
  return bar_tau_to_tau(state.q, bar_tau);
}

}  // namespace geosmc
