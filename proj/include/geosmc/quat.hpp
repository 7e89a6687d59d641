#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "geosmc/types.hpp"

namespace geosmc {

/// Drift beyond which quaternion-valued results are silently renormalized.
inline constexpr double kRenormTolerance = 1e-12;

/**
 * \brief Point on S^3 stored scalar-first as [q0, qv].
 *
 * Every constructor enforces unit norm: inputs whose norm differs from one by
 * more than kRenormTolerance are rescaled. A zero vector cannot be normalized
 * and throws std::domain_error.
 */
template <typename Scalar>
class UnitQuaternion
{
 public:
  UnitQuaternion() : coeffs_(unit_one<Scalar>()) {}

  UnitQuaternion(Scalar q0, Scalar q1, Scalar q2, Scalar q3)
      : UnitQuaternion(Vector4<Scalar>(q0, q1, q2, q3))
  {}

  explicit UnitQuaternion(const Vector4<Scalar>& coeffs) : coeffs_(coeffs)
  {
    using std::abs;
    using std::isfinite;
    const Scalar n = coeffs_.norm();
    if (!(n > Scalar(0)) || !isfinite(n))
      throw std::domain_error("UnitQuaternion: cannot normalize a zero or non-finite vector");
    if (abs(n - Scalar(1)) > Scalar(kRenormTolerance))
      coeffs_ /= n;
  }

  static UnitQuaternion identity() { return UnitQuaternion(); }

  const Vector4<Scalar>& coeffs() const { return coeffs_; }
  Scalar scalar() const { return coeffs_[0]; }
  Vector3<Scalar> vec() const { return coeffs_.template tail<3>(); }

  /// Antipodal point -q (same attitude).
  UnitQuaternion operator-() const { return UnitQuaternion(Vector4<Scalar>(-coeffs_)); }

  template <typename Other>
  UnitQuaternion<Other> cast() const
  {
    return UnitQuaternion<Other>(coeffs_.template cast<Other>());
  }

 private:
  Vector4<Scalar> coeffs_;
};

using UnitQuaterniond = UnitQuaternion<double>;

/// Cross-product matrix: hat(w) * v == w.cross(v).
template <typename Derived>
Matrix3<typename Derived::Scalar> hat(const Eigen::MatrixBase<Derived>& w)
{
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  Matrix3<Scalar> m;
  m << Scalar(0), -w(2), w(1),
       w(2), Scalar(0), -w(0),
       -w(1), w(0), Scalar(0);
  return m;
}

/// J(x) = [-xv^T ; x0 I + hat(xv)]. Maps body rates to quaternion rates: qdot = J(q) w / 2.
template <typename Derived>
Matrix43<typename Derived::Scalar> map_J(const Eigen::MatrixBase<Derived>& x)
{
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 4);
  using Scalar = typename Derived::Scalar;
  Matrix43<Scalar> j;
  j.row(0) = -x.template tail<3>().transpose();
  j.template bottomRows<3>() = x(0) * Matrix3<Scalar>::Identity() + hat(x.template tail<3>());
  return j;
}

/// L(x) = [-xv^T ; x0 I - hat(xv)].
template <typename Derived>
Matrix43<typename Derived::Scalar> map_L(const Eigen::MatrixBase<Derived>& x)
{
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 4);
  using Scalar = typename Derived::Scalar;
  Matrix43<Scalar> l;
  l.row(0) = -x.template tail<3>().transpose();
  l.template bottomRows<3>() = x(0) * Matrix3<Scalar>::Identity() - hat(x.template tail<3>());
  return l;
}

/// Q(x) = [x J(x)]; Q(x) y is the quaternion product x * y.
template <typename Derived>
Matrix4<typename Derived::Scalar> map_Q(const Eigen::MatrixBase<Derived>& x)
{
  Matrix4<typename Derived::Scalar> m;
  m.col(0) = x;
  m.template rightCols<3>() = map_J(x);
  return m;
}

/// W(x) = [x L(x)]; W(y) x is the quaternion product x * y.
template <typename Derived>
Matrix4<typename Derived::Scalar> map_W(const Eigen::MatrixBase<Derived>& x)
{
  Matrix4<typename Derived::Scalar> m;
  m.col(0) = x;
  m.template rightCols<3>() = map_L(x);
  return m;
}

template <typename Scalar>
Matrix43<Scalar> map_J(const UnitQuaternion<Scalar>& q) { return map_J(q.coeffs()); }
template <typename Scalar>
Matrix43<Scalar> map_L(const UnitQuaternion<Scalar>& q) { return map_L(q.coeffs()); }
template <typename Scalar>
Matrix4<Scalar> map_Q(const UnitQuaternion<Scalar>& q) { return map_Q(q.coeffs()); }
template <typename Scalar>
Matrix4<Scalar> map_W(const UnitQuaternion<Scalar>& q) { return map_W(q.coeffs()); }

/// Quaternion product q1 * q2 = Q(q1) q2, renormalized on drift.
template <typename Scalar>
UnitQuaternion<Scalar> qmul(const UnitQuaternion<Scalar>& q1, const UnitQuaternion<Scalar>& q2)
{
  return UnitQuaternion<Scalar>(Vector4<Scalar>(map_Q(q1.coeffs()) * q2.coeffs()));
}

/// Conjugate [x0, -xv] of an ambient 4-vector. On S^3 this is the inverse.
template <typename Derived>
Vector4<typename Derived::Scalar> conjugate(const Eigen::MatrixBase<Derived>& x)
{
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 4);
  Vector4<typename Derived::Scalar> c = x;
  c.template tail<3>() = -c.template tail<3>();
  return c;
}

template <typename Scalar>
UnitQuaternion<Scalar> qinv(const UnitQuaternion<Scalar>& q)
{
  return UnitQuaternion<Scalar>(conjugate(q.coeffs()));
}

/// Body-to-inertial rotation R(q) = I + 2 q0 hat(qv) + 2 hat(qv)^2.
template <typename Scalar>
Matrix3<Scalar> rodrigues(const UnitQuaternion<Scalar>& q)
{
  const Matrix3<Scalar> v = hat(q.vec());
  return Matrix3<Scalar>::Identity() + Scalar(2) * q.scalar() * v + Scalar(2) * v * v;
}

/// Unit quaternion for a rotation of |rotation_vector| radians about its direction.
template <typename Derived>
UnitQuaternion<typename Derived::Scalar> axis_angle(const Eigen::MatrixBase<Derived>& rotation_vector)
{
  using Scalar = typename Derived::Scalar;
  using std::cos;
  using std::sin;
  const Scalar angle = rotation_vector.norm();
  if (angle == Scalar(0))
    return UnitQuaternion<Scalar>::identity();
  Vector4<Scalar> c;
  c(0) = cos(angle / Scalar(2));
  c.template tail<3>() = sin(angle / Scalar(2)) * rotation_vector / angle;
  return UnitQuaternion<Scalar>(c);
}

/// Uniform sample on S^3: a normalized vector of four independent standard normals.
template <typename Scalar = double, typename Urbg>
UnitQuaternion<Scalar> random_unit_quaternion(Urbg& rng)
{
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  for (;;) {
    Vector4<Scalar> v;
    for (int i = 0; i < 4; ++i)
      v(i) = normal(rng);
    const Scalar n = v.norm();
    if (n > Scalar(1e-9))
      return UnitQuaternion<Scalar>(Vector4<Scalar>(v / n));
  }
}

/**
 * Seeded, single-owner stream of unit quaternions. The same seed always
 * yields the same sequence.
 */
class QuaternionSampler
{
 public:
  explicit QuaternionSampler(std::uint64_t seed) : rng_(seed) {}

  UnitQuaterniond operator()() { return random_unit_quaternion<double>(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace geosmc
