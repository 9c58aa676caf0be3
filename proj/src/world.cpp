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

#include "brickbot/world.hpp"

#include <cmath>
#include <string>

#include "brickbot/error.hpp"

namespace brickbot {

void LocalizationModel::validate() const {
  if (!(freeze_probability_per_meter >= 0.0 && freeze_probability_per_meter <= 1.0)) {
    throw MalformedValue("freeze probability per meter must be in [0, 1]");
  }
  if (!(freeze_duration >= 0.0) || !(drift_sigma >= 0.0)) {
    throw MalformedValue("localization parameters must be non-negative");
  }
}

WorldState::WorldState(std::vector<Brick> bricks_, const Pose6D& assembly, const Pose2D& start,
                       std::uint64_t seed)
    : bricks(std::move(bricks_)), assembly_area(assembly), rng(seed) {
  ugv.true_pose = start;
  ugv.believed_pose = start;
  localization.last_true_pose = start;
}

const Brick& WorldState::brick(int index) const {
  for (const auto& b : bricks) {
    if (b.index == index) {
      return b;
    }
  }
  throw UnknownBrick("no brick with index " + std::to_string(index));
}

Brick& WorldState::brick(int index) {
  return const_cast<Brick&>(static_cast<const WorldState&>(*this).brick(index));
}

std::optional<int> WorldState::carried_index() const {
  for (const auto& b : bricks) {
    if (b.status == BrickStatus::Carried) {
      return b.index;
    }
  }
  return std::nullopt;
}

UgvState step_kinematics(const UgvState& ugv, const MotionCommand& cmd, double dt) {
  UgvState next = ugv;
  const double c = std::cos(ugv.true_pose.theta);
  const double s = std::sin(ugv.true_pose.theta);
  next.true_pose = Pose2D(ugv.true_pose.x + (c * cmd.vx - s * cmd.vy) * dt,
                          ugv.true_pose.y + (s * cmd.vx + c * cmd.vy) * dt,
                          ugv.true_pose.theta + cmd.omega * dt);
  next.velocity = cmd;
  return next;
}

Pose2D localize(WorldState& world, const LocalizationModel& model, double dt) {
  auto& loc = world.localization;
  const Pose2D& truth = world.ugv.true_pose;
  const double travelled = std::hypot(truth.x - loc.last_true_pose.x, truth.y - loc.last_true_pose.y);
  loc.last_true_pose = truth;

  if (loc.freeze_remaining > 0.0) {
    loc.freeze_remaining -= dt;
    return world.ugv.believed_pose;
  }
  if (travelled > 0.0 && model.freeze_probability_per_meter > 0.0) {
    const double p_step = 1.0 - std::pow(1.0 - model.freeze_probability_per_meter, travelled);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    if (uniform(world.rng) < p_step) {
      loc.freeze_remaining = model.freeze_duration;
      loc.freeze_start_times.push_back(world.time);
      return world.ugv.believed_pose;
    }
  }
  if (travelled > 0.0 && model.drift_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, model.drift_sigma * std::sqrt(travelled));
    loc.drift_x += noise(world.rng);
    loc.drift_y += noise(world.rng);
  }
  world.ugv.believed_pose = Pose2D(truth.x + loc.drift_x, truth.y + loc.drift_y, truth.theta);
  return world.ugv.believed_pose;
}

void advance(WorldState& world, const MotionCommand& cmd, double dt,
             const LocalizationModel& model) {
  world.ugv = step_kinematics(world.ugv, cmd, dt);
  if (world.carried_in_body) {
    if (auto idx = world.carried_index()) {
      world.brick(*idx).pose = transform_pose(world.ugv.true_pose, *world.carried_in_body);
    }
  }
  world.time += dt;
  localize(world, model, dt);
}

Pose2D believed_from_true(const WorldState& world) {
  return compose(world.ugv.believed_pose, inverse(world.ugv.true_pose));
}

double press_gripper(WorldState& world, int target_brick, double depth_increment,
                     const GripperModel& model) {
  if (!(depth_increment > 0.0)) {
    throw std::invalid_argument("depth increment must be positive");
  }
  const Brick& brick = world.brick(target_brick);
  const Pose2D& base = world.ugv.true_pose;
  const double reach = std::hypot(brick.pose.centroid.x() - base.x, brick.pose.centroid.y() - base.y);
  if (reach > model.arm_reach) {
    throw OutOfReach("brick " + std::to_string(target_brick) + " is " + std::to_string(reach) +
                     " m from the base");
  }
  auto& gripper = world.ugv.gripper;
  gripper.press_depth += depth_increment;
  const double tilt = std::acos(std::min(1.0, std::abs(brick.pose.normal_axis.z())));
  if (tilt > model.tilt_tolerance) {
    gripper.contact_force = 0.0;
  } else {
    gripper.contact_force = model.k_foam * std::max(0.0, gripper.press_depth - model.contact_depth);
  }
  if (gripper.press_depth > model.max_depth && gripper.contact_force <= model.force_threshold) {
    throw MaxDepthExceeded("pressed " + std::to_string(gripper.press_depth) + " m, force " +
                           std::to_string(gripper.contact_force) + " N");
  }
  return gripper.contact_force;
}

void retract_gripper(WorldState& world) {
  world.ugv.gripper.press_depth = 0.0;
  world.ugv.gripper.contact_force = 0.0;
}

void attach_brick(WorldState& world, int brick_index) {
  Brick& brick = world.brick(brick_index);
  auto& gripper = world.ugv.gripper;
  if (!(gripper.contact_force > 0.0)) {
    throw NoContact("gripper is not in contact with brick " + std::to_string(brick_index));
  }
  if (gripper.magnet_on || world.carried_index()) {
    throw NoContact("magnet is already engaged");
  }
  gripper.magnet_on = true;
  brick.status = BrickStatus::Carried;
  world.carried_in_body = transform_pose(inverse(world.ugv.true_pose), brick.pose);
}

void detach_brick(WorldState& world, int brick_index, const Pose6D& commanded_place_pose) {
  Brick& brick = world.brick(brick_index);
  if (brick.status != BrickStatus::Carried) {
    throw NotCarried("brick " + std::to_string(brick_index) + " is not carried");
  }
  brick.pose = transform_pose(inverse(believed_from_true(world)), commanded_place_pose);
  brick.status = BrickStatus::Placed;
  world.carried_in_body.reset();
  world.ugv.gripper = GripperState{};
}

void drop_carried(WorldState& world) {
  if (auto idx = world.carried_index()) {
    world.brick(*idx).status = BrickStatus::Placed;
  }
  world.carried_in_body.reset();
  world.ugv.gripper = GripperState{};
}

void stow_carried(WorldState& world, const Pose6D& body_pose) {
  auto idx = world.carried_index();
  if (!idx) {
    throw NotCarried("nothing to stow");
  }
  world.carried_in_body = body_pose;
  world.brick(*idx).pose = transform_pose(world.ugv.true_pose, body_pose);
  retract_gripper(world);
}

}  // namespace brickbot
