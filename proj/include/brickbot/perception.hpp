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

#include <optional>
#include <random>
#include <vector>

#include "brickbot/brick.hpp"
#include "brickbot/geometry.hpp"
#include "brickbot/world.hpp"

namespace brickbot {

/// Arm-mounted camera. Pixel u grows to the right of the optical axis:
///   u = width/2 + (width / horizontal_fov) * bearing
/// where bearing is measured clockwise (rightward) from the optical axis.
/// v is fixed at height/2. Range is the ground-plane distance from the
/// sensor to the brick centroid.
struct CameraModel {
  Pose2D mount;  // relative to the vehicle base
  double mount_height = 1.0;
  double horizontal_fov = 1.2;
  double max_range = 25.0;
  int image_width = 640;
  int image_height = 480;

  void validate() const;
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

struct Detection {
  BrickClass brick_class = BrickClass::R;
  int brick_index = 0;
  PixelCoord pixel_centroid;
  double range = 0.0;
  double mask_area_fraction = 0.0;
};

struct TargetTrack {
  int brick_index = 0;
  bool valid = false;
  PixelCoord pixel_centroid;  // meaningful only when valid
  double range = 0.0;         // meaningful only when valid
};

struct Observation {
  double bearing = 0.0;  // rad, clockwise from the optical axis
  double range = 0.0;
  PixelCoord pixel;
};

/// Geometric visibility of a world point from the camera: inside the open
/// FOV wedge and within (0, max_range].
std::optional<Observation> observe(const WorldState& world, const CameraModel& camera,
                                   const Vec3& point);

/// All in-pile bricks visible from the camera, ordered by brick index.
std::vector<Detection> detect(const WorldState& world, const CameraModel& camera);

/// Throws UnknownBrick.
TargetTrack track_target(const WorldState& world, const CameraModel& camera, int target);

struct CloudGrid {
  int rows = 10;  // samples along the brick major axis
  int cols = 6;   // samples across
};

/// Samples the grasp patch on the target's top face in world coordinates,
/// with independent N(0, sigma) noise per coordinate. Draws from `rng` only
/// when sigma > 0. Throws NotVisible or UnknownBrick.
PointCloud ferromagnetic_cloud(const WorldState& world, const CameraModel& camera, int target,
                               double sigma, std::mt19937_64& rng, CloudGrid grid = {});

}  // namespace brickbot
