/*
 * Copyright (C) 2026 The brickbot authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "brickbot/error.hpp"
#include "brickbot/geometry.hpp"

using namespace brickbot;

namespace {

constexpr double kPi = std::numbers::pi;

// Homogeneous SE(2) matrix, used as an oracle for compose/inverse.
Eigen::Matrix3d se2(const Pose2D& p) {
  Eigen::Matrix3d m;
  m << std::cos(p.theta), -std::sin(p.theta), p.x, std::sin(p.theta), std::cos(p.theta), p.y, 0, 0,
      1;
  return m;
}

void expect_pose_near(const Pose2D& a, const Pose2D& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(std::abs(wrap_angle(a.theta - b.theta)), 0.0, tol);
}

void expect_parallel(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(std::abs(a.normalized().dot(b.normalized())), 1.0, tol) << a.transpose() << " vs "
                                                                      << b.transpose();
}

PointCloud rectangle_cloud() {
  PointCloud c;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      c.points.emplace_back(0.125 * sx, 0.075 * sy, 0.0);
    }
  }
  return c;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

PointCloud grid_cloud(const Mat3& r, const Vec3& t) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 6; ++j) {
      const Vec3 p(-0.125 + 0.25 * i / 9.0, -0.075 + 0.15 * j / 5.0, 0.01 * ((i + j) % 2) - 0.005);
      c.points.push_back(r * p + t);
    }
  }
  return c;
}

}  // namespace

TEST(WrapAngle, Boundaries) {
  EXPECT_EQ(wrap_angle(kPi), kPi);
  EXPECT_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_EQ(wrap_angle(0.3), 0.3);
  EXPECT_NEAR(wrap_angle(-5 * kPi / 2), -kPi / 2, 1e-14);
  EXPECT_NEAR(wrap_angle(101 * kPi), kPi, 1e-12);
}

TEST(WrapAngle, IdempotentAndInRange) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = wrap_angle(u(rng));
    EXPECT_GT(a, -kPi);
    EXPECT_LE(a, kPi);
    EXPECT_EQ(wrap_angle(a), a);
  }
}

TEST(Compose, Examples) {
  expect_pose_near(compose({0, 0, 0}, {1, 2, kPi / 2}), {1, 2, kPi / 2}, 1e-15);
  expect_pose_near(compose({0, 0, kPi / 2}, {1, 0, 0}), {0, 1, kPi / 2}, 1e-15);
  expect_pose_near(compose({1, 1, kPi}, {1, 1, kPi}), {0, 0, 0}, 1e-15);
}

TEST(Compose, MatchesMatrixOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose2D a(u(rng), u(rng), u(rng));
    const Pose2D b(u(rng), u(rng), u(rng));
    const Eigen::Matrix3d m = se2(a) * se2(b);
    const Pose2D c = compose(a, b);
    expect_pose_near(c, Pose2D(m(0, 2), m(1, 2), std::atan2(m(1, 0), m(0, 0))), 1e-12);
    const Eigen::Matrix3d mi = se2(a).inverse();
    expect_pose_near(inverse(a), Pose2D(mi(0, 2), mi(1, 2), std::atan2(mi(1, 0), mi(0, 0))), 1e-12);
    expect_pose_near(compose(a, between(a, b)), b, 1e-12);
  }
}

TEST(Compose, AssociativeWithIdentity) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const Pose2D id;
  for (int i = 0; i < 1000; ++i) {
    const Pose2D a(u(rng), u(rng), u(rng));
    const Pose2D b(u(rng), u(rng), u(rng));
    const Pose2D c(u(rng), u(rng), u(rng));
    expect_pose_near(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-12);
    expect_pose_near(compose(id, a), a, 0.0);
    expect_pose_near(compose(a, id), a, 1e-15);
  }
}

TEST(TransformPose, RotatesAxesAboutZ) {
  const Pose6D p = Pose6D::from_yaw(Vec3(1, 0, 0.5), 0.0);
  const Pose6D q = transform_pose(Pose2D(0, 0, kPi / 2), p);
  EXPECT_NEAR((q.centroid - Vec3(0, 1, 0.5)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((q.major_axis - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(q.yaw(), kPi / 2, 1e-15);
}

TEST(AxisAngle, IgnoresSign) {
  EXPECT_NEAR(axis_angle_unsigned(Vec3::UnitX(), -Vec3::UnitX()), 0.0, 1e-15);
  EXPECT_NEAR(axis_angle_unsigned(Vec3::UnitX(), Vec3::UnitY()), kPi / 2, 1e-15);
  EXPECT_NEAR(axis_angle_unsigned(Vec3(1, 1, 0), Vec3(-1, 0, 0)), kPi / 4, 1e-15);
}

TEST(SymmetricEigen, MatchesEigenSolver) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    Mat3 b;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b(r, c) = u(rng);
    const Mat3 a = b * b.transpose();
    const SymmetricEigen mine = symmetric_eigen3(a);
    Eigen::SelfAdjointEigenSolver<Mat3> ref(a);
    const double scale = a.cwiseAbs().maxCoeff();
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(mine.values[k], ref.eigenvalues()(2 - k), 1e-10 * scale);
      const Vec3 v = mine.vectors.col(k);
      EXPECT_NEAR(v.norm(), 1.0, 1e-12);
      EXPECT_NEAR((a * v - mine.values[k] * v).norm(), 0.0, 1e-9 * scale);
    }
    EXPECT_NEAR((mine.vectors.transpose() * mine.vectors - Mat3::Identity()).norm(), 0.0, 1e-10);
  }
}

TEST(SymmetricEigen, RepeatedEigenvalues) {
  const SymmetricEigen iso = symmetric_eigen3(Mat3::Identity() * 2.0);
  for (double v : iso.values) EXPECT_NEAR(v, 2.0, 1e-14);
  EXPECT_NEAR((iso.vectors.transpose() * iso.vectors - Mat3::Identity()).norm(), 0.0, 1e-12);

  const Mat3 d = Vec3(3.0, 1.0, 1.0).asDiagonal();
  const SymmetricEigen e = symmetric_eigen3(d);
  EXPECT_NEAR(e.values[0], 3.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
  EXPECT_NEAR(e.values[2], 1.0, 1e-14);
  expect_parallel(e.vectors.col(0), Vec3::UnitX(), 1e-14);

  const SymmetricEigen z = symmetric_eigen3(Mat3::Zero());
  for (double v : z.values) EXPECT_EQ(v, 0.0);
}

TEST(PcaPose, AxisAlignedRectangle) {
  const Pose6D p = pca_pose(rectangle_cloud());
  EXPECT_NEAR(p.centroid.norm(), 0.0, 1e-15);
  EXPECT_NEAR((p.major_axis - Vec3::UnitX()).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.minor_axis - Vec3::UnitY()).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.normal_axis - Vec3::UnitZ()).norm(), 0.0, 1e-12);
}

TEST(PcaPose, RotatedTranslatedRectangle) {
  // Oracle: covariance from the rotated points, eigenvectors from Eigen.
  PointCloud c = rectangle_cloud();
  const double a = kPi / 6;
  const Mat3 r = Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
  for (auto& p : c.points) p = r * p + Vec3(1, 2, 0.3);
  Vec3 mean = Vec3::Zero();
  for (const auto& p : c.points) mean += p;
  mean /= 4.0;
  Mat3 cov = Mat3::Zero();
  for (const auto& p : c.points) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> ref(cov / 4.0);

  const Pose6D p = pca_pose(c);
  EXPECT_NEAR((p.centroid - Vec3(1, 2, 0.3)).norm(), 0.0, 1e-12);
  expect_parallel(p.major_axis, ref.eigenvectors().col(2), 1e-12);
  EXPECT_NEAR((p.major_axis - Vec3(std::cos(a), std::sin(a), 0)).norm(), 0.0, 1e-12);
}

TEST(PcaPose, Errors) {
  PointCloud c;
  c.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  EXPECT_THROW(pca_pose(c), InsufficientPoints);
  c.points.push_back(Vec3(2, 0, 0));
  EXPECT_THROW(pca_pose(c), DegenerateCloud);
  c.points = {Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)};
  EXPECT_THROW(pca_pose(c), DegenerateCloud);
}

TEST(PcaPose, SignConvention) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Pose6D p = pca_pose(grid_cloud(random_rotation(rng), Vec3::Zero()));
    EXPECT_GE(p.major_axis.x(), -1e-12);
    EXPECT_GE(p.normal_axis.z(), -1e-12);
    EXPECT_NEAR((p.normal_axis.cross(p.major_axis) - p.minor_axis).norm(), 0.0, 1e-12);
    EXPECT_NEAR((p.major_axis.cross(p.minor_axis) - p.normal_axis).norm(), 0.0, 1e-12);
  }
}

TEST(PcaPose, TranslationAndRotationEquivariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 500; ++i) {
    const Mat3 r0 = random_rotation(rng);
    const PointCloud base = grid_cloud(r0, Vec3::Zero());
    const Pose6D p0 = pca_pose(base);

    const Vec3 v(u(rng), u(rng), u(rng));
    PointCloud moved = base;
    for (auto& p : moved.points) p += v;
    const Pose6D p1 = pca_pose(moved);
    EXPECT_NEAR((p1.centroid - (p0.centroid + v)).norm(), 0.0, 1e-9);
    expect_parallel(p1.major_axis, p0.major_axis, 1e-9);
    expect_parallel(p1.normal_axis, p0.normal_axis, 1e-9);

    const Mat3 r = random_rotation(rng);
    PointCloud turned = base;
    for (auto& p : turned.points) p = r * p;
    const Pose6D p2 = pca_pose(turned);
    expect_parallel(p2.major_axis, r * p0.major_axis, 1e-9);
    expect_parallel(p2.minor_axis, r * p0.minor_axis, 1e-9);
    expect_parallel(p2.normal_axis, r * p0.normal_axis, 1e-9);
  }
}

TEST(PcaPose, VarianceOrdering) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    PointCloud c;
    for (int k = 0; k < 30; ++k) c.points.emplace_back(3 * n(rng), 2 * n(rng), n(rng));
    const Pose6D p = pca_pose(c);
    auto var = [&](const Vec3& axis) {
      double s = 0.0;
      for (const auto& q : c.points) s += std::pow((q - p.centroid).dot(axis), 2);
      return s;
    };
    EXPECT_GE(var(p.major_axis), var(p.minor_axis) - 1e-9);
    EXPECT_GE(var(p.minor_axis), var(p.normal_axis) - 1e-9);
  }
}
