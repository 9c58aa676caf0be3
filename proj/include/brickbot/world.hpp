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

#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "brickbot/brick.hpp"
#include "brickbot/control.hpp"
#include "brickbot/geometry.hpp"

namespace brickbot {

enum class BrickStatus { InPile, Carried, Placed };

struct Brick {
  int index = 0;
  BrickSpec spec;
  Pose6D pose;
  BrickStatus status = BrickStatus::InPile;
};

struct GripperState {
  double press_depth = 0.0;  // m
  bool magnet_on = false;
  double contact_force = 0.0;  // N
};

struct UgvState {
  Pose2D true_pose;
  Pose2D believed_pose;
  MotionCommand velocity;
  GripperState gripper;
};

/// Stand-in for visual SLAM. Freezes start with the given probability per
/// meter of translation and hold the believed pose for `freeze_duration`
/// while the vehicle keeps moving. Drift is a random walk whose standard
/// deviation reaches `drift_sigma` after one meter of travel.
struct LocalizationModel {
  double freeze_probability_per_meter = 0.0;
  double freeze_duration = 8.0;  // s
  double drift_sigma = 0.0;      // m per sqrt(m) traveled

  void validate() const;
};

/// Foam-backed electromagnetic gripper on a fixed-reach arm.
struct GripperModel {
  double k_foam = 5000.0;       // N/m
  double contact_depth = 0.0;   // m of travel before the foam touches
  double max_depth = 0.05;      // m
  double force_threshold = 55.0;  // N
  double tilt_tolerance = 10.0 * std::numbers::pi / 180.0;  // rad
  double arm_reach = 1.0;       // m, horizontal
};

struct LocalizationRuntime {
  double freeze_remaining = 0.0;
  double drift_x = 0.0;
  double drift_y = 0.0;
  Pose2D last_true_pose;
  std::vector<double> freeze_start_times;
};

struct WorldState {
  std::vector<Brick> bricks;
  Pose6D assembly_area;
  UgvState ugv;
  double time = 0.0;
  std::mt19937_64 rng;
  LocalizationRuntime localization;
  /// Pose of the carried brick in the vehicle body frame.
  std::optional<Pose6D> carried_in_body;

  WorldState() = default;
  WorldState(std::vector<Brick> bricks_, const Pose6D& assembly, const Pose2D& start,
             std::uint64_t seed);

  /// Throws UnknownBrick.
  const Brick& brick(int index) const;
  Brick& brick(int index);
  std::optional<int> carried_index() const;
};

/// Integrates a body-frame command over dt (holonomic base, Euler step).
UgvState step_kinematics(const UgvState& ugv, const MotionCommand& cmd, double dt);

/// Updates and returns the believed pose after the true pose moved.
Pose2D localize(WorldState& world, const LocalizationModel& model, double dt);

/// One simulation tick: kinematics, carried-brick follow, localization, clock.
void advance(WorldState& world, const MotionCommand& cmd, double dt,
             const LocalizationModel& model);

/// Transform that maps true world coordinates to where the vehicle believes
/// they are (identity when localization is exact).
Pose2D believed_from_true(const WorldState& world);

/// Pushes the gripper further onto the brick and returns the contact force.
/// Tilt beyond the foam tolerance yields no usable contact.
double press_gripper(WorldState& world, int target_brick, double depth_increment,
                     const GripperModel& model);

/// Retracts the gripper without releasing a carried brick.
void retract_gripper(WorldState& world);

void attach_brick(WorldState& world, int brick_index);

/// Releases the carried brick at `commanded_place_pose`, which is expressed
/// in the vehicle's believed frame; the brick lands wherever that pose maps
/// to in the true world.
void detach_brick(WorldState& world, int brick_index, const Pose6D& commanded_place_pose);

/// Sets the carried brick down where it currently is (mission abort).
void drop_carried(WorldState& world);

/// Moves the carried brick to a fixed body-frame pose on the vehicle deck.
void stow_carried(WorldState& world, const Pose6D& body_pose);

}  // namespace brickbot
