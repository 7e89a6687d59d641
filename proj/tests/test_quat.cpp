#include <gtest/gtest.h>

#include "geosmc/quat.hpp"

using namespace geosmc;

namespace {

void expect_near(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol)
{
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << "actual:\n" << a << "\nexpected:\n" << b;
}

}  // namespace

TEST(UnitQuaternion, DefaultIsIdentity)
{
  expect_near(UnitQuaterniond().coeffs(), Vector4d(1, 0, 0, 0), 0.0);
}

TEST(UnitQuaternion, RenormalizesDriftedInput)
{
  const UnitQuaterniond q(Vector4d(2.0, 0.0, 0.0, 0.0));
  expect_near(q.coeffs(), Vector4d(1, 0, 0, 0), 1e-15);
  const UnitQuaterniond r(1.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(r.coeffs().norm(), 1.0, 1e-15);
}

TEST(UnitQuaternion, KeepsInputWithinTolerance)
{
  const Vector4d v = Vector4d(1.0 + 5e-13, 0.0, 0.0, 0.0);
  EXPECT_EQ(UnitQuaterniond(v).coeffs(), v);
}

TEST(UnitQuaternion, RejectsZeroAndNonFinite)
{
  EXPECT_THROW(UnitQuaterniond(Vector4d::Zero()), std::domain_error);
  EXPECT_THROW(UnitQuaterniond(Vector4d(std::nan(""), 0, 0, 0)), std::domain_error);
}

TEST(Qmul, IdentityAndInverse)
{
  QuaternionSampler sample(1);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaterniond q = sample();
    expect_near(qmul(UnitQuaterniond::identity(), q).coeffs(), q.coeffs(), 1e-15);
    expect_near(qmul(q, qinv(q)).coeffs(), unit_one<double>(), 1e-12);
    expect_near(qmul(qinv(q), q).coeffs(), unit_one<double>(), 1e-12);
  }
}

TEST(Qmul, BasisProduct)
{
  // i * j = k
  expect_near(qmul(UnitQuaterniond(0, 1, 0, 0), UnitQuaterniond(0, 0, 1, 0)).coeffs(), Vector4d(0, 0, 0, 1), 0.0);
  expect_near(qmul(UnitQuaterniond(0, 0, 1, 0), UnitQuaterniond(0, 1, 0, 0)).coeffs(), Vector4d(0, 0, 0, -1), 0.0);
}

TEST(Qmul, MatchesHamiltonProduct)
{
  QuaternionSampler sample(2);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaterniond a = sample();
    const UnitQuaterniond b = sample();
    const double a0 = a.scalar();
    const double b0 = b.scalar();
    const Vector3d av = a.vec();
    const Vector3d bv = b.vec();
    Vector4d expected;
    expected << a0 * b0 - av.dot(bv), a0 * bv + b0 * av + av.cross(bv);
    expect_near(qmul(a, b).coeffs(), expected, 1e-15);
  }
}

TEST(Qinv, Examples)
{
  expect_near(qinv(UnitQuaterniond::identity()).coeffs(), unit_one<double>(), 0.0);
  expect_near(qinv(UnitQuaterniond(0, 1, 0, 0)).coeffs(), Vector4d(0, -1, 0, 0), 0.0);
}

TEST(Maps, JAtIdentity)
{
  Matrix43d expected = Matrix43d::Zero();
  expected.bottomRows<3>() = Matrix3d::Identity();
  expect_near(map_J(unit_one<double>()), expected, 0.0);
  expect_near(map_L(unit_one<double>()), expected, 0.0);
}

TEST(Maps, BlockStructure)
{
  const Vector4d x(0.3, -1.2, 0.7, 2.0);
  const Vector3d v = x.tail<3>();
  const Matrix43d j = map_J(x);
  const Matrix43d l = map_L(x);
  expect_near(j.row(0), -v.transpose(), 0.0);
  expect_near(l.row(0), -v.transpose(), 0.0);
  expect_near(j.bottomRows<3>(), x(0) * Matrix3d::Identity() + hat(v), 0.0);
  expect_near(l.bottomRows<3>(), x(0) * Matrix3d::Identity() - hat(v), 0.0);
  const Matrix4d q = map_Q(x);
  const Matrix4d w = map_W(x);
  expect_near(q.col(0), x, 0.0);
  expect_near(w.col(0), x, 0.0);
  expect_near(q.rightCols<3>(), j, 0.0);
  expect_near(w.rightCols<3>(), l, 0.0);
}

TEST(Maps, QAtIdentityIsIdentity)
{
  expect_near(map_Q(unit_one<double>()), Matrix4d::Identity(), 0.0);
  expect_near(map_W(unit_one<double>()), Matrix4d::Identity(), 0.0);
}

TEST(Maps, JTransposeAnnihilatesArgument)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 1000; ++i) {
    const Vector4d x(n(rng), n(rng), n(rng), n(rng));
    EXPECT_LE((map_J(x).transpose() * x).norm(), 1e-14);
    expect_near(map_J(x).transpose() * map_J(x), x.squaredNorm() * Matrix3d::Identity(), 1e-13);
  }
}

TEST(Maps, QwSwapAndOrthogonality)
{
  QuaternionSampler sample(4);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaterniond q = sample();
    const Vector4d y = sample().coeffs() * 3.0;
    expect_near(map_Q(q) * y, map_W(y) * q.coeffs(), 1e-14);
    expect_near(map_Q(q).transpose() * map_Q(q), Matrix4d::Identity(), 1e-14);
    EXPECT_NEAR(map_Q(q).determinant(), 1.0, 1e-12);
    EXPECT_NEAR(map_W(q).determinant(), 1.0, 1e-12);
  }
}

TEST(Maps, QMatchesLeftAndWRightMultiplication)
{
  QuaternionSampler sample(5);
  const UnitQuaterniond a = sample();
  const UnitQuaterniond b = sample();
  expect_near(map_Q(a) * b.coeffs(), qmul(a, b).coeffs(), 1e-15);
  expect_near(map_W(b) * a.coeffs(), qmul(a, b).coeffs(), 1e-15);
}

TEST(Rodrigues, Examples)
{
  expect_near(rodrigues(UnitQuaterniond::identity()), Matrix3d::Identity(), 0.0);
  expect_near(rodrigues(UnitQuaterniond(0, 1, 0, 0)), Vector3d(1, -1, -1).asDiagonal().toDenseMatrix(), 0.0);
}

TEST(Rodrigues, DoubleCoverAndSO3)
{
  QuaternionSampler sample(6);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaterniond q = sample();
    const Matrix3d r = rodrigues(q);
    expect_near(r, rodrigues(-q), 1e-15);
    expect_near(r.transpose() * r, Matrix3d::Identity(), 1e-10);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-10);
  }
}

TEST(Rodrigues, RotatesLikeQuaternionSandwich)
{
  QuaternionSampler sample(7);
  const UnitQuaterniond q = sample();
  const Vector3d v(0.4, -1.0, 2.5);
  const Vector4d pure(0.0, v.x(), v.y(), v.z());
  const Vector4d rotated = map_Q(q) * (map_W(conjugate(q.coeffs())) * pure);
  expect_near(rodrigues(q) * v, rotated.tail<3>(), 1e-14);
  EXPECT_NEAR(rotated(0), 0.0, 1e-14);
}

TEST(Rodrigues, AgreesWithEigen)
{
  QuaternionSampler sample(8);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaterniond q = sample();
    const Eigen::Quaterniond e(q.scalar(), q.vec().x(), q.vec().y(), q.vec().z());
    expect_near(rodrigues(q), e.toRotationMatrix(), 1e-14);
  }
}

TEST(Hat, Examples)
{
  expect_near(hat(Vector3d::Zero().eval()), Matrix3d::Zero(), 0.0);
  expect_near(hat(Vector3d(1, 0, 0)) * Vector3d(0, 1, 0), Vector3d(0, 0, 1), 0.0);
  const Vector3d w(0.2, -3.0, 1.5);
  expect_near(hat(w) * w, Vector3d::Zero(), 1e-15);
  expect_near(hat(w).transpose(), -hat(w), 0.0);
  const Vector3d v(1.0, 2.0, -0.5);
  expect_near(hat(w) * v, w.cross(v), 1e-15);
}

TEST(AxisAngle, HalfAngleEncoding)
{
  const UnitQuaterniond q = axis_angle(Vector3d(0, 0, M_PI / 2));
  expect_near(q.coeffs(), Vector4d(std::cos(M_PI / 4), 0, 0, std::sin(M_PI / 4)), 1e-15);
  expect_near(axis_angle(Vector3d::Zero().eval()).coeffs(), unit_one<double>(), 0.0);
}

TEST(Sampling, UnitNormAndReproducible)
{
  QuaternionSampler a(42);
  QuaternionSampler b(42);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaterniond qa = a();
    EXPECT_NEAR(qa.coeffs().norm(), 1.0, 1e-12);
    EXPECT_EQ(qa.coeffs(), b().coeffs());
  }
}

TEST(Sampling, ScalarPartHasZeroMean)
{
  QuaternionSampler sample(9);
  double sum = 0.0;
  double sum_sq = 0.0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double q0 = sample().scalar();
    sum += q0;
    sum_sq += q0 * q0;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  // Each component of a uniform point on S^3 has second moment 1/4.
  EXPECT_NEAR(sum_sq / n, 0.25, 0.01);
}

TEST(ScalarGenerality, FloatAndLongDouble)
{
  const UnitQuaternion<float> qf(0.5f, 0.5f, 0.5f, 0.5f);
  EXPECT_NEAR((map_Q(qf).transpose() * map_Q(qf) - Matrix4<float>::Identity()).norm(), 0.0f, 1e-6f);
  const UnitQuaternion<long double> ql(0.5L, 0.5L, 0.5L, 0.5L);
  const Matrix3<long double> r = rodrigues(ql);
  EXPECT_NEAR(static_cast<double>(r.determinant()), 1.0, 1e-15);
  const UnitQuaterniond back = ql.cast<double>();
  EXPECT_NEAR(back.scalar(), 0.5, 1e-16);
}
