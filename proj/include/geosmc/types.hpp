#pragma once

#include <Eigen/Dense>

namespace geosmc {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Matrix43 = Eigen::Matrix<Scalar, 4, 3>;

using Vector3d = Vector3<double>;
using Vector4d = Vector4<double>;
using Matrix3d = Matrix3<double>;
using Matrix4d = Matrix4<double>;
using Matrix43d = Matrix43<double>;

/// Scalar-first identity element [1, 0, 0, 0] of S^3, as an ambient 4-vector.
template <typename Scalar>
Vector4<Scalar> unit_one()
{
  return Vector4<Scalar>(Scalar(1), Scalar(0), Scalar(0), Scalar(0));
}

}  // namespace geosmc
