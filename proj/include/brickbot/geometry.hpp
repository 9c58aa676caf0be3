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

#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

namespace brickbot {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Wraps an angle into (-pi, pi]. Values already in range are returned
/// unchanged, so the function is idempotent bit-for-bit.
double wrap_angle(double a);

/// Planar pose of the ground vehicle. theta is kept in (-pi, pi].
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_);
};

/// SE(2) product: `delta` expressed in the frame of `base`.
Pose2D compose(const Pose2D& base, const Pose2D& delta);
Pose2D inverse(const Pose2D& pose);
/// Pose of `to` expressed in the frame of `from`.
Pose2D between(const Pose2D& from, const Pose2D& to);
/// Maps a world point through a planar rigid transform (rotation about z).
Vec3 transform_point(const Pose2D& transform, const Vec3& point);

/// Brick pose: centroid plus an orthonormal right-handed axis triad.
struct Pose6D {
  Vec3 centroid = Vec3::Zero();
  Vec3 major_axis = Vec3::UnitX();
  Vec3 minor_axis = Vec3::UnitY();
  Vec3 normal_axis = Vec3::UnitZ();

  /// Level pose with the major axis at `yaw` from world +x.
  static Pose6D from_yaw(const Vec3& centroid, double yaw);

  /// Heading of the major axis projected on the ground plane.
  double yaw() const;
};

/// Applies a planar rigid transform to a 6D pose (axes rotate about z).
Pose6D transform_pose(const Pose2D& transform, const Pose6D& pose);

/// Angle between two major axes, ignoring sign, in [0, pi/2].
double axis_angle_unsigned(const Vec3& a, const Vec3& b);

enum class Frame { World, Camera };

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::World;
};

/// Eigenvalues in descending order with matching unit eigenvectors (columns).
struct SymmetricEigen {
  std::array<double, 3> values{};
  Mat3 vectors = Mat3::Identity();
};

/// Closed-form eigendecomposition of a symmetric 3x3 matrix. Eigenvalues come
/// from the trigonometric solution of the characteristic cubic; the vector of
/// the best-separated eigenvalue is taken from row cross products and the
/// other two are resolved in its orthogonal complement.
SymmetricEigen symmetric_eigen3(const Mat3& a);

/// Centroid and principal axes of a cloud. The major axis is flipped to point
/// along +x (ties: +y), the normal is flipped to point up, and
/// minor = normal x major.
Pose6D pca_pose(const PointCloud& cloud);

}  // namespace brickbot
