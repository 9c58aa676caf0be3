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

#include "brickbot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "brickbot/error.hpp"

namespace brickbot {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateEigenvalue = 1e-12;
constexpr double kTieEigenvalue = 1e-12;
constexpr double kSignTie = 1e-12;

// Unit vector of the null direction of (a - lambda I), taken as the longest
// cross product of two rows. Empty when the null space is not one-dimensional.
std::optional<Vec3> null_vector(const Mat3& a, double lambda) {
  Mat3 m = a - lambda * Mat3::Identity();
  const Vec3 r0 = m.row(0).transpose();
  const Vec3 r1 = m.row(1).transpose();
  const Vec3 r2 = m.row(2).transpose();
  const std::array<Vec3, 3> candidates{r0.cross(r1), r0.cross(r2), r1.cross(r2)};
  std::size_t best = 0;
  double best_norm = candidates[0].squaredNorm();
  for (std::size_t i = 1; i < 3; ++i) {
    const double n = candidates[i].squaredNorm();
    if (n > best_norm) {
      best = i;
      best_norm = n;
    }
  }
  // Rows are O(1) after scaling; anything this small means rank < 2.
  if (best_norm < 1e-24) {
    return std::nullopt;
  }
  return Vec3(candidates[best] / std::sqrt(best_norm));
}

void orthogonal_complement(const Vec3& w, Vec3& u, Vec3& v) {
  if (std::abs(w.x()) > std::abs(w.y())) {
    u = Vec3(-w.z(), 0.0, w.x()) / std::hypot(w.x(), w.z());
  } else {
    u = Vec3(0.0, w.z(), -w.y()) / std::hypot(w.y(), w.z());
  }
  v = w.cross(u);
}

// Eigenvector of `a` for `lambda` restricted to span{u, v}. Falls back to u
// when the restricted problem is a double root.
Vec3 vector_in_plane(const Mat3& a, double lambda, const Vec3& u, const Vec3& v) {
  const Vec3 au = a * u;
  const Vec3 av = a * v;
  const double m00 = u.dot(au) - lambda;
  const double m01 = u.dot(av);
  const double m11 = v.dot(av) - lambda;
  double cu = 0.0;
  double cv = 0.0;
  if (std::hypot(m00, m01) >= std::hypot(m01, m11)) {
    cu = m01;
    cv = -m00;
  } else {
    cu = m11;
    cv = -m01;
  }
  const double n = std::hypot(cu, cv);
  if (n < 1e-14) {
    return u;
  }
  return (cu * u + cv * v) / n;
}

Vec3 project_unit(const Vec3& dir, const Vec3& axis) {
  return (dir - dir.dot(axis) * axis).normalized();
}

// Direction in the plane normal to `axis` closest to +x, else +y.
Vec3 preferred_in_plane(const Vec3& axis) {
  Vec3 p = Vec3::UnitX() - axis.x() * axis;
  if (p.norm() < 1e-6) {
    p = Vec3::UnitY() - axis.y() * axis;
  }
  return p.normalized();
}

}  // namespace

double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) {
    return a;
  }
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) {
    r += 2.0 * kPi;
  }
  r -= kPi;
  if (r <= -kPi) {
    r = kPi;
  }
  return r;
}

Pose2D::Pose2D(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

Pose2D compose(const Pose2D& base, const Pose2D& delta) {
  const double c = std::cos(base.theta);
  const double s = std::sin(base.theta);
  return Pose2D(base.x + c * delta.x - s * delta.y, base.y + s * delta.x + c * delta.y,
                base.theta + delta.theta);
}

Pose2D inverse(const Pose2D& pose) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return Pose2D(-c * pose.x - s * pose.y, s * pose.x - c * pose.y, -pose.theta);
}

Pose2D between(const Pose2D& from, const Pose2D& to) { return compose(inverse(from), to); }

Vec3 transform_point(const Pose2D& transform, const Vec3& point) {
  const double c = std::cos(transform.theta);
  const double s = std::sin(transform.theta);
  return Vec3(transform.x + c * point.x() - s * point.y(),
              transform.y + s * point.x() + c * point.y(), point.z());
}

Pose6D Pose6D::from_yaw(const Vec3& centroid, double yaw) {
  Pose6D p;
  p.centroid = centroid;
  p.major_axis = Vec3(std::cos(yaw), std::sin(yaw), 0.0);
  p.normal_axis = Vec3::UnitZ();
  p.minor_axis = p.normal_axis.cross(p.major_axis);
  return p;
}

double Pose6D::yaw() const { return std::atan2(major_axis.y(), major_axis.x()); }

Pose6D transform_pose(const Pose2D& transform, const Pose6D& pose) {
  const Pose2D rotation(0.0, 0.0, transform.theta);
  Pose6D out;
  out.centroid = transform_point(transform, pose.centroid);
  out.major_axis = transform_point(rotation, pose.major_axis);
  out.minor_axis = transform_point(rotation, pose.minor_axis);
  out.normal_axis = transform_point(rotation, pose.normal_axis);
  return out;
}

double axis_angle_unsigned(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), std::abs(a.dot(b)));
}

SymmetricEigen symmetric_eigen3(const Mat3& a) {
  SymmetricEigen out;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    out.values = {0.0, 0.0, 0.0};
    return out;
  }
  const Mat3 b = a / scale;

  const double p1 = b(0, 1) * b(0, 1) + b(0, 2) * b(0, 2) + b(1, 2) * b(1, 2);
  if (p1 == 0.0) {
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return b(i, i) > b(j, j); });
    for (int k = 0; k < 3; ++k) {
      out.values[k] = a(order[k], order[k]);
      out.vectors.col(k) = Vec3::Unit(order[k]);
    }
    return out;
  }

  const double q = b.trace() / 3.0;
  const double p2 = (b(0, 0) - q) * (b(0, 0) - q) + (b(1, 1) - q) * (b(1, 1) - q) +
                    (b(2, 2) - q) * (b(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Mat3 c = (b - q * Mat3::Identity()) / p;
  const double r = std::clamp(c.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = q + 2.0 * p * std::cos(phi);
  const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  const double l2 = 3.0 * q - l1 - l3;

  Vec3 v1;
  Vec3 v2;
  Vec3 v3;
  Vec3 u;
  Vec3 w;
  if (l1 - l2 >= l2 - l3) {
    v1 = null_vector(b, l1).value_or(Vec3::UnitX());
    orthogonal_complement(v1, u, w);
    v2 = vector_in_plane(b, l2, u, w);
    v3 = v1.cross(v2);
  } else {
    v3 = null_vector(b, l3).value_or(Vec3::UnitZ());
    orthogonal_complement(v3, u, w);
    v2 = vector_in_plane(b, l2, u, w);
    v1 = v2.cross(v3);
  }
  out.values = {l1 * scale, l2 * scale, l3 * scale};
  out.vectors.col(0) = v1;
  out.vectors.col(1) = v2;
  out.vectors.col(2) = v3;
  return out;
}

Pose6D pca_pose(const PointCloud& cloud) {
  const auto& pts = cloud.points;
  if (pts.size() < 3) {
    throw InsufficientPoints("need at least 3 points, got " + std::to_string(pts.size()));
  }
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) {
    mean += p;
  }
  mean /= static_cast<double>(pts.size());

  Mat3 cov = Mat3::Zero();
  for (const auto& p : pts) {
    const Vec3 d = p - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(pts.size());

  const SymmetricEigen eig = symmetric_eigen3(cov);
  if (eig.values[1] < kDegenerateEigenvalue && eig.values[2] < kDegenerateEigenvalue) {
    throw DegenerateCloud("points are collinear or coincident");
  }

  Vec3 major = eig.vectors.col(0);
  Vec3 normal = eig.vectors.col(2);
  if (eig.values[1] - eig.values[2] < kTieEigenvalue) {
    // Normal is ambiguous within the plane orthogonal to the major axis.
    normal = project_unit(Vec3::UnitZ(), major);
    if (!normal.allFinite()) {
      normal = preferred_in_plane(major);
    }
  }
  if (eig.values[0] - eig.values[1] < kTieEigenvalue) {
    major = preferred_in_plane(normal);
  }

  normal = project_unit(normal, major);
  if (normal.z() < -kSignTie ||
      (std::abs(normal.z()) <= kSignTie &&
       (normal.x() < -kSignTie || (std::abs(normal.x()) <= kSignTie && normal.y() < 0.0)))) {
    normal = -normal;
  }
  if (major.x() < -kSignTie || (std::abs(major.x()) <= kSignTie && major.y() < 0.0)) {
    major = -major;
  }

  Pose6D pose;
  pose.centroid = mean;
  pose.major_axis = major;
  pose.normal_axis = normal;
  pose.minor_axis = normal.cross(major);
  return pose;
}

}  // namespace brickbot
