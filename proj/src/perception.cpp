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

#include "brickbot/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "brickbot/error.hpp"

namespace brickbot {

void CameraModel::validate() const {
  if (!(horizontal_fov > 0.0 && horizontal_fov < std::numbers::pi)) {
    throw MalformedValue("camera fov must be in (0, pi)");
  }
  if (!(max_range > 0.0)) {
    throw MalformedValue("camera max_range must be positive");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw MalformedValue("camera image size must be positive");
  }
}

std::optional<Observation> observe(const WorldState& world, const CameraModel& camera,
                                   const Vec3& point) {
  const Pose2D sensor = compose(world.ugv.true_pose, camera.mount);
  const Pose2D local = between(sensor, Pose2D(point.x(), point.y(), 0.0));
  const double range = std::hypot(local.x, local.y);
  if (!(range > 0.0) || range > camera.max_range) {
    return std::nullopt;
  }
  const double bearing = -std::atan2(local.y, local.x);
  if (std::abs(bearing) >= 0.5 * camera.horizontal_fov) {
    return std::nullopt;
  }
  Observation obs;
  obs.bearing = bearing;
  obs.range = range;
  obs.pixel.u = 0.5 * camera.image_width + camera.image_width / camera.horizontal_fov * bearing;
  obs.pixel.v = 0.5 * camera.image_height;
  return obs;
}

std::vector<Detection> detect(const WorldState& world, const CameraModel& camera) {
  std::vector<Detection> out;
  for (const auto& brick : world.bricks) {
    if (brick.status != BrickStatus::InPile) {
      continue;
    }
    const auto obs = observe(world, camera, brick.pose.centroid);
    if (!obs) {
      continue;
    }
    Detection d;
    d.brick_class = brick.spec.brick_class;
    d.brick_index = brick.index;
    d.pixel_centroid = obs->pixel;
    d.range = obs->range;
    // Angular footprint of the top face against the angular image area.
    const double footprint = brick.spec.length * brick.spec.width / (obs->range * obs->range);
    const double image = camera.horizontal_fov * camera.horizontal_fov *
                         camera.image_height / camera.image_width;
    d.mask_area_fraction = std::clamp(footprint / image, 1e-9, 1.0);
    out.push_back(d);
  }
  std::sort(out.begin(), out.end(),
            [](const Detection& a, const Detection& b) { return a.brick_index < b.brick_index; });
  return out;
}

TargetTrack track_target(const WorldState& world, const CameraModel& camera, int target) {
  const Brick& brick = world.brick(target);
  TargetTrack track;
  track.brick_index = target;
  if (brick.status != BrickStatus::InPile) {
    return track;
  }
  if (const auto obs = observe(world, camera, brick.pose.centroid)) {
    track.valid = true;
    track.pixel_centroid = obs->pixel;
    track.range = obs->range;
  }
  return track;
}

PointCloud ferromagnetic_cloud(const WorldState& world, const CameraModel& camera, int target,
                               double sigma, std::mt19937_64& rng, CloudGrid grid) {
  const Brick& brick = world.brick(target);
  if (!observe(world, camera, brick.pose.centroid)) {
    throw NotVisible("brick " + std::to_string(target) + " is outside the camera view");
  }
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("cloud noise sigma must be non-negative");
  }
  if (grid.rows < 2 || grid.cols < 2) {
    throw std::invalid_argument("cloud grid needs at least 2 x 2 samples");
  }
  const Pose6D& pose = brick.pose;
  const Vec3 center = pose.centroid + 0.5 * brick.spec.height * pose.normal_axis;

  PointCloud cloud;
  cloud.frame = Frame::World;
  cloud.points.reserve(static_cast<std::size_t>(grid.rows * grid.cols));
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
  for (int i = 0; i < grid.rows; ++i) {
    const double s = kFerroLength * (static_cast<double>(i) / (grid.rows - 1) - 0.5);
    for (int j = 0; j < grid.cols; ++j) {
      const double t = kFerroWidth * (static_cast<double>(j) / (grid.cols - 1) - 0.5);
      Vec3 p = center + s * pose.major_axis + t * pose.minor_axis;
      if (sigma > 0.0) {
        p.x() += noise(rng);
        p.y() += noise(rng);
        p.z() += noise(rng);
      }
      cloud.points.push_back(p);
    }
  }
  return cloud;
}

}  // namespace brickbot
