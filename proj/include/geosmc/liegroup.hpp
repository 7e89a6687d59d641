#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "geosmc/quat.hpp"

namespace geosmc {

/// Largest |q^T p| accepted as a tangent vector at runtime.
inline constexpr double kTangencyTolerance = 1e-6;

class TangencyError : public std::domain_error
{
 public:
  using std::domain_error::domain_error;
};

/// Element g = (q, p) of TS^3, with p in the tangent space at q.
template <typename Scalar>
struct TangentBundlePoint
{
  UnitQuaternion<Scalar> q;
  Vector4<Scalar> p = Vector4<Scalar>::Zero();
};

using TangentBundlePointd = TangentBundlePoint<double>;

/// The group constant lambda > 0 shared by the group law and the sliding variable.
template <typename Scalar>
class GroupParams
{
 public:
  explicit GroupParams(Scalar lambda) : lambda_(lambda)
  {
    if (!(lambda > Scalar(0)))
      throw std::invalid_argument("GroupParams: lambda must be positive");
  }

  Scalar lambda() const { return lambda_; }

 private:
  Scalar lambda_;
};

/// Which cover point of the identity attitude the sliding variable targets.
enum class SlidingSign
{
  Unsigned,  ///< always +1
  Signed,    ///< +1 for q0 >= 0, -1 otherwise
};

template <typename Scalar>
void require_tangent(const UnitQuaternion<Scalar>& q, const Vector4<Scalar>& p, const char* where)
{
  using std::abs;
  const Scalar residual = q.coeffs().dot(p);
  if (!(abs(residual) <= Scalar(kTangencyTolerance)))
    throw TangencyError(std::string(where) + ": vector is not tangent to S^3 at q (|q.p| = " +
                        std::to_string(static_cast<double>(residual)) + ")");
}

/// Effective gain sigma * lambda, with sigma = -1 only in signed mode when q0 < 0.
template <typename Scalar>
Scalar signed_lambda(const UnitQuaternion<Scalar>& q, Scalar lambda, SlidingSign sign)
{
  return (sign == SlidingSign::Signed && q.scalar() < Scalar(0)) ? -lambda : lambda;
}

/**
 * sigma lambda (q0 q - 1). Tangent at q for either sign. With sigma = -1 the
 * sliding dynamics qdot = -sigma lambda (q0 q - 1) drive q0 to -1 instead of +1.
 */
template <typename Scalar>
Vector4<Scalar> sliding_offset(const UnitQuaternion<Scalar>& q, Scalar lambda,
                               SlidingSign sign = SlidingSign::Unsigned)
{
  return signed_lambda(q, lambda, sign) * (q.scalar() * q.coeffs() - unit_one<Scalar>());
}

template <typename Scalar>
TangentBundlePoint<Scalar> group_identity()
{
  return {UnitQuaternion<Scalar>::identity(), Vector4<Scalar>::Zero()};
}

/**
 * Group law on TS^3:
 *   g1 g2 = (Q(q1) q2,
 *            Q(q1) p2 + W(q2) p1 + lambda Q(q1)(q02 q2 - 1) + lambda W(q2)(q01 q1 - 1)
 *            - lambda (q0,12 Q(q1) q2 - 1)).
 *
 * Throws TangencyError when either operand is not a tangent-bundle point.
 */
template <typename Scalar>
TangentBundlePoint<Scalar> group_op(const TangentBundlePoint<Scalar>& g1, const TangentBundlePoint<Scalar>& g2,
                                    const GroupParams<Scalar>& params)
{
  require_tangent(g1.q, g1.p, "group_op");
  require_tangent(g2.q, g2.p, "group_op");

  const Scalar lambda = params.lambda();
  const Vector4<Scalar> one = unit_one<Scalar>();
  const Vector4<Scalar>& q1 = g1.q.coeffs();
  const Vector4<Scalar>& q2 = g2.q.coeffs();
  const Matrix4<Scalar> Q1 = map_Q(q1);
  const Matrix4<Scalar> W2 = map_W(q2);
  const Vector4<Scalar> q12 = Q1 * q2;

  Vector4<Scalar> p = Q1 * g2.p + W2 * g1.p;
  p += lambda * (Q1 * (q2(0) * q2 - one));
  p += lambda * (W2 * (q1(0) * q1 - one));
  p -= lambda * (q12(0) * q12 - one);
  return {UnitQuaternion<Scalar>(q12), p};
}

/// g^-1 = (conj(q), conj(p)).
template <typename Scalar>
TangentBundlePoint<Scalar> group_inv(const TangentBundlePoint<Scalar>& g)
{
  return {qinv(g.q), conjugate(g.p)};
}

/// s(g) = p + lambda (q0 q - 1).
template <typename Scalar>
Vector4<Scalar> sliding_var(const TangentBundlePoint<Scalar>& g, const GroupParams<Scalar>& params)
{
  return g.p + sliding_offset(g.q, params.lambda());
}

/// s(g) = p + sign(q0) lambda (q0 q - 1); identical to sliding_var for q0 >= 0.
template <typename Scalar>
Vector4<Scalar> sliding_var_signed(const TangentBundlePoint<Scalar>& g, const GroupParams<Scalar>& params)
{
  return g.p + sliding_offset(g.q, params.lambda(), SlidingSign::Signed);
}

template <typename Scalar>
Vector4<Scalar> sliding_var(const TangentBundlePoint<Scalar>& g, const GroupParams<Scalar>& params,
                            SlidingSign sign)
{
  return g.p + sliding_offset(g.q, params.lambda(), sign);
}

/// Membership in H = { g : s(g) = 0 } up to tol.
template <typename Scalar>
bool on_sliding_subgroup(const TangentBundlePoint<Scalar>& g, const GroupParams<Scalar>& params, Scalar tol)
{
  if (!(tol > Scalar(0)))
    throw std::invalid_argument("on_sliding_subgroup: tolerance must be positive");
  return sliding_var(g, params).norm() <= tol;
}

/// The unique member of H over q: (q, -lambda (q0 q - 1)).
template <typename Scalar>
TangentBundlePoint<Scalar> project_to_subgroup(const UnitQuaternion<Scalar>& q, const GroupParams<Scalar>& params)
{
  return {q, Vector4<Scalar>(-sliding_offset(q, params.lambda()))};
}

}  // namespace geosmc
