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

#include "brickbot/mission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "brickbot/error.hpp"

namespace brickbot {

namespace {

constexpr double kNegligibleAngle = 1e-12;
constexpr double kNegligibleDistance = 1e-12;

Module module_of(MissionState s) {
  switch (s) {
    case MissionState::Search:
      return Module::Searching;
    case MissionState::Track:
      return Module::Tracking;
    case MissionState::Align:
      return Module::Alignment;
    case MissionState::Grasp:
    case MissionState::Store:
      return Module::Grasping;
    default:
      return Module::Placing;
  }
}

void move_rotate(MissionContext& ctx, double angle, const LocalizationModel& model) {
  if (std::abs(angle) < kNegligibleAngle) {
    return;
  }
  WorldState& world = ctx.world;
  const double start = world.ugv.believed_pose.theta;
  const double sign = angle < 0.0 ? -1.0 : 1.0;
  const VelocityProfile profile(std::abs(angle), ctx.config.v_max_angular);
  follow(
      profile, MotionAxis::Rotate, sign,
      [&] {
        double p = sign * wrap_angle(world.ugv.believed_pose.theta - start);
        if (p < -0.5 * std::numbers::pi) {
          p += 2.0 * std::numbers::pi;
        }
        return p;
      },
      ctx.config.follow,
      [&](const MotionCommand& cmd) { advance(world, cmd, ctx.config.dt(), model); });
}

void move_forward(MissionContext& ctx, double distance, const LocalizationModel& model) {
  if (distance < kNegligibleDistance) {
    return;
  }
  WorldState& world = ctx.world;
  const Pose2D start = world.ugv.believed_pose;
  const double c = std::cos(start.theta);
  const double s = std::sin(start.theta);
  const VelocityProfile profile(distance, ctx.config.v_max_linear);
  follow(
      profile, MotionAxis::Forward, 1.0,
      [&] {
        const Pose2D& b = world.ugv.believed_pose;
        return (b.x - start.x) * c + (b.y - start.y) * s;
      },
      ctx.config.follow,
      [&](const MotionCommand& cmd) { advance(world, cmd, ctx.config.dt(), model); });
}

bool pose_within(const Pose2D& actual, const Pose2D& goal, const MissionConfig& config) {
  const double position = std::hypot(actual.x - goal.x, actual.y - goal.y);
  const double heading = std::abs(wrap_angle(actual.theta - goal.theta));
  return position <= config.max_position_error && heading <= config.max_heading_error;
}

// Perceived pose of a brick from its grasp patch, in the believed frame, with
// the centroid moved from the top face down to the brick center.
Pose6D measure_brick(MissionContext& ctx, int index) {
  WorldState& world = ctx.world;
  PointCloud cloud = ferromagnetic_cloud(world, ctx.config.camera, index,
                                         ctx.config.perception_sigma, world.rng,
                                         ctx.config.cloud_grid);
  const Pose2D to_believed = believed_from_true(world);
  for (auto& p : cloud.points) {
    p = transform_point(to_believed, p);
  }
  Pose6D pose = pca_pose(cloud);
  pose.centroid -= 0.5 * world.brick(index).spec.height * pose.normal_axis;
  return pose;
}

void abandon_brick(MissionContext& ctx) {
  if (ctx.world.carried_index()) {
    drop_carried(ctx.world);
  }
  retract_gripper(ctx.world);
}

}  // namespace

std::string_view to_string(MissionState s) {
  switch (s) {
    case MissionState::Search:
      return "Search";
    case MissionState::Track:
      return "Track";
    case MissionState::Align:
      return "Align";
    case MissionState::Grasp:
      return "Grasp";
    case MissionState::Store:
      return "Store";
    case MissionState::Navigate:
      return "Navigate";
    case MissionState::AlignPlace:
      return "AlignPlace";
    case MissionState::Place:
      return "Place";
    case MissionState::UpdateBook:
      return "UpdateBook";
    case MissionState::Done:
      return "Done";
    case MissionState::Failed:
      return "Failed";
  }
  return "?";
}

bool is_allowed_transition(MissionState from, MissionState to) {
  using S = MissionState;
  static constexpr std::array<std::pair<S, S>, 17> kEdges{{
      {S::Search, S::Search},
      {S::Search, S::Track},
      {S::Search, S::Failed},
      {S::Track, S::Align},
      {S::Track, S::Search},
      {S::Align, S::Grasp},
      {S::Align, S::Failed},
      {S::Grasp, S::Store},
      {S::Grasp, S::Failed},
      {S::Store, S::Navigate},
      {S::Navigate, S::AlignPlace},
      {S::Navigate, S::Failed},
      {S::AlignPlace, S::Place},
      {S::Place, S::UpdateBook},
      {S::Place, S::Failed},
      {S::UpdateBook, S::Search},
      {S::UpdateBook, S::Done},
  }};
  return std::find(kEdges.begin(), kEdges.end(), std::make_pair(from, to)) != kEdges.end();
}

std::string_view to_string(Module m) {
  switch (m) {
    case Module::Searching:
      return "Searching";
    case Module::Tracking:
      return "Tracking";
    case Module::Alignment:
      return "Alignment";
    case Module::Grasping:
      return "Grasping";
    case Module::Placing:
      return "Placing";
  }
  return "?";
}

bool BrickRecord::conditional_structure_holds() const {
  // Success* Failure? NotAttempted*
  std::size_t i = 0;
  while (i < kModuleCount && outcomes[i] == Outcome::Success) ++i;
  if (i < kModuleCount && outcomes[i] == Outcome::Failure) ++i;
  while (i < kModuleCount && outcomes[i] == Outcome::NotAttempted) ++i;
  return i == kModuleCount;
}

void VisitedPoses::add(const Pose2D& pose, BrickClass brick_class) {
  entries_.emplace_back(pose, brick_class);
}

bool VisitedPoses::excludes(double x, double y, BrickClass brick_class) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) {
    return e.second == brick_class &&
           std::hypot(e.first.x - x, e.first.y - y) <= exclusion_radius_;
  });
}

MissionContext::MissionContext(WorldState& world_, PatternBook& book_,
                               const MissionConfig& config_)
    : world(world_), book(book_), config(config_), visited(config_.exclusion_radius) {
  begin_brick();
}

void MissionContext::begin_brick() {
  target_class = next_target_brick(book);
  target_index.reset();
  record = BrickRecord{};
  if (target_class) {
    record.brick_class = *target_class;
  }
  search_misses = 0;
  exploration_moves = 0;
  lost_time = 0.0;
  brick_start_time = world.time;
  align_goal.reset();
  anchor_pose.reset();
  pending_place_pose.reset();
  state = target_class ? MissionState::Search : MissionState::Done;
}

MotionCommand track_command(const TargetTrack& track, const MissionConfig& config) {
  const auto& g = config.tracking;
  const double v_max = config.v_max_linear;
  MotionCommand cmd;
  if (!track.valid) {
    return cmd;
  }
  if (track.range <= g.stop_threshold) {
    return cmd;
  }
  const double width = config.camera.image_width;
  const double offset = (track.pixel_centroid.u - 0.5 * width) / width;
  cmd.vy = std::clamp(-g.k_lat * v_max * offset, -v_max, v_max);

  const double cruise = std::min(v_max, g.k_fwd * std::max(track.range, g.slow_range));
  if (track.range >= g.slow_range) {
    cmd.vx = std::min(v_max, g.k_fwd * track.range);
  } else {
    const double fraction = (track.range - g.stop_threshold) / (g.slow_range - g.stop_threshold);
    cmd.vx = std::max(config.follow.min_speed_fraction * v_max, cruise * fraction);
  }
  return cmd;
}

int press_until_threshold(const std::function<double()>& press, double threshold) {
  int presses = 0;
  while (true) {
    const double force = press();
    ++presses;
    if (force > threshold) {
      return presses;
    }
  }
}

void execute_alignment(MissionContext& ctx, const AlignmentPlan& plan,
                       const LocalizationModel& model) {
  move_rotate(ctx, plan.a2, model);
  move_forward(ctx, plan.d, model);
  move_rotate(ctx, plan.a1, model);
}

MissionState step_search(MissionContext& ctx) {
  if (ctx.state != MissionState::Search || !ctx.target_class) {
    throw std::logic_error("step_search called outside Search");
  }
  WorldState& world = ctx.world;
  const MissionConfig& config = ctx.config;
  if (world.time - ctx.brick_start_time > config.max_brick_time) {
    return MissionState::Failed;
  }

  const Pose2D camera_belief = compose(world.ugv.believed_pose, config.camera.mount);
  std::optional<Detection> best;
  for (const auto& d : detect(world, config.camera)) {
    if (d.brick_class != *ctx.target_class || ctx.consumed.contains(d.brick_index)) {
      continue;
    }
    if (config.miss_probability > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      if (u(world.rng) < config.miss_probability) {
        continue;
      }
    }
    const double bearing = -(d.pixel_centroid.u - 0.5 * config.camera.image_width) *
                           config.camera.horizontal_fov / config.camera.image_width;
    const double x = camera_belief.x + d.range * std::cos(camera_belief.theta + bearing);
    const double y = camera_belief.y + d.range * std::sin(camera_belief.theta + bearing);
    if (ctx.visited.excludes(x, y, *ctx.target_class)) {
      continue;
    }
    if (!best || d.range < best->range) {
      best = d;
    }
  }
  if (best) {
    ctx.target_index = best->brick_index;
    ctx.record.brick_index = best->brick_index;
    ctx.lost_time = 0.0;
    ctx.search_misses = 0;
    return MissionState::Track;
  }

  try {
    if (ctx.search_misses >= config.rotations_per_revolution) {
      ctx.search_misses = 0;
      if (ctx.exploration_moves >= config.max_search_steps) {
        return MissionState::Failed;
      }
      ++ctx.exploration_moves;
      ctx.last_motion = {CommandedMotion::Kind::Forward, config.exploration_step, {}};
      move_forward(ctx, config.exploration_step, config.quiet_localization);
    } else {
      // Clockwise.
      ++ctx.search_misses;
      ctx.last_motion = {CommandedMotion::Kind::Rotate, -config.search_rotation, {}};
      move_rotate(ctx, -config.search_rotation, config.quiet_localization);
    }
  } catch (const FeedbackStalled&) {
    // The vehicle still turned; the next detection decides.
  }
  return MissionState::Search;
}

MissionState step_track(MissionContext& ctx) {
  if (ctx.state != MissionState::Track || !ctx.target_index) {
    throw std::logic_error("step_track called outside Track");
  }
  WorldState& world = ctx.world;
  const MissionConfig& config = ctx.config;
  // Closed-loop approach at the control rate until the target is reached or lost.
  while (true) {
    TargetTrack track = track_target(world, config.camera, *ctx.target_index);
    if (track.valid && config.miss_probability > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      track.valid = u(world.rng) >= config.miss_probability;
    }
    if (!track.valid || world.time - ctx.brick_start_time > config.max_brick_time) {
      ctx.lost_time += config.dt();
      ctx.last_motion = {CommandedMotion::Kind::Velocity, 0.0, {}};
      advance(world, MotionCommand{}, config.dt(), config.quiet_localization);
      if (ctx.lost_time > config.tracking.lost_timeout ||
          world.time - ctx.brick_start_time > config.max_brick_time) {
        ctx.target_index.reset();
        return MissionState::Search;
      }
      continue;
    }
    ctx.lost_time = 0.0;
    const MotionCommand cmd = track_command(track, config);
    ctx.last_motion = {CommandedMotion::Kind::Velocity, 0.0, cmd};
    if (cmd.vx == 0.0) {
      return MissionState::Align;
    }
    advance(world, cmd, config.dt(), config.quiet_localization);
  }
}

MissionState step_align(MissionContext& ctx) {
  if (ctx.state != MissionState::Align || !ctx.target_index || !ctx.target_class) {
    throw std::logic_error("step_align called outside Align");
  }
  WorldState& world = ctx.world;
  const MissionConfig& config = ctx.config;
  const int index = *ctx.target_index;

  const auto obs = observe(world, config.camera, world.brick(index).pose.centroid);
  if (!obs || obs->range < config.align_range_min || obs->range > config.align_range_max) {
    return MissionState::Failed;
  }
  try {
    const Pose2D to_believed = believed_from_true(world);
    const Pose6D brick = measure_brick(ctx, index);
    const Pose2D start = world.ugv.believed_pose;
    const Pose2D goal = goal_pose_for_grasp(start, brick, config.planner.standoff);
    const Pose2D goal_true = compose(inverse(to_believed), goal);
    const AlignmentPlan plan = plan_alignment(start, goal, config.planner.position_epsilon);
    execute_alignment(ctx, plan, config.align_localization);
    ctx.align_goal = goal;
    if (!pose_within(world.ugv.true_pose, goal_true, config)) {
      return MissionState::Failed;
    }
  } catch (const Error&) {
    return MissionState::Failed;
  }
  ctx.visited.add(world.ugv.believed_pose, *ctx.target_class);
  return MissionState::Grasp;
}

MissionState step_grasp(MissionContext& ctx) {
  WorldState& world = ctx.world;
  const MissionConfig& config = ctx.config;
  if (ctx.state == MissionState::Store) {
    stow_carried(world, config.stow_pose);
    return MissionState::Navigate;
  }
  if (ctx.state != MissionState::Grasp || !ctx.target_index) {
    throw std::logic_error("step_grasp called outside Grasp/Store");
  }
  const int index = *ctx.target_index;
  try {
    press_until_threshold(
        [&] { return press_gripper(world, index, config.depth_increment, config.gripper); },
        config.gripper.force_threshold);
    attach_brick(world, index);
  } catch (const Error&) {
    retract_gripper(world);
    return MissionState::Failed;
  }
  return MissionState::Store;
}

MissionState step_navigate_and_place(MissionContext& ctx) {
  WorldState& world = ctx.world;
  const MissionConfig& config = ctx.config;
  PatternBook& book = ctx.book;

  switch (ctx.state) {
    case MissionState::Navigate: {
      try {
        const Pose2D start = world.ugv.believed_pose;
        const Pose2D goal =
            goal_pose_for_grasp(start, book.previous_place_pose, config.planner.standoff);
        execute_alignment(ctx, plan_alignment(start, goal, config.planner.position_epsilon),
                          config.place_localization);
        if (!pose_within(world.ugv.true_pose, goal, config)) {
          return MissionState::Failed;
        }
      } catch (const Error&) {
        return MissionState::Failed;
      }
      return MissionState::AlignPlace;
    }

    case MissionState::AlignPlace: {
      ctx.anchor_pose = book.previous_place_pose;
      if (book.previous_brick_id && ctx.last_placed_index) {
        try {
          Pose6D measured = measure_brick(ctx, *ctx.last_placed_index);
          const Pose6D& stored = book.previous_place_pose;
          if (measured.major_axis.dot(stored.major_axis) < 0.0) {
            measured.major_axis = -measured.major_axis;
          }
          if (measured.normal_axis.dot(stored.normal_axis) < 0.0) {
            measured.normal_axis = -measured.normal_axis;
          }
          measured.minor_axis = measured.normal_axis.cross(measured.major_axis);
          ctx.anchor_pose = measured;
        } catch (const Error&) {
          // Keep the stored pose when the previous brick cannot be measured.
        }
      }
      return MissionState::Place;
    }

    case MissionState::Place: {
      if (!ctx.target_index || !ctx.target_class || !ctx.anchor_pose) {
        throw std::logic_error("Place without a carried target");
      }
      try {
        const Pose6D place = compute_place_pose(*ctx.anchor_pose, book.previous_brick_id,
                                                *ctx.target_class, book, config.catalog,
                                                config.planner.gap);
        const Pose2D start = world.ugv.believed_pose;
        const Pose2D goal = goal_pose_for_grasp(start, place, config.planner.standoff);
        execute_alignment(ctx, plan_alignment(start, goal, config.planner.position_epsilon),
                          config.place_localization);
        detach_brick(world, *ctx.target_index, place);
        const Pose6D& placed = world.brick(*ctx.target_index).pose;
        ctx.record.place_pose = place;
        ctx.record.place_position_error = (placed.centroid - place.centroid).norm();
        ctx.record.place_angle_error = axis_angle_unsigned(placed.major_axis, place.major_axis);
        if (ctx.record.place_position_error > config.max_position_error ||
            ctx.record.place_angle_error > config.max_heading_error) {
          return MissionState::Failed;
        }
        ctx.pending_place_pose = place;
      } catch (const Error&) {
        return MissionState::Failed;
      }
      return MissionState::UpdateBook;
    }

    case MissionState::UpdateBook: {
      book.record_placement(*ctx.target_class, *ctx.pending_place_pose);
      ctx.last_placed_index = ctx.target_index;
      return next_target_brick(book) ? MissionState::Search : MissionState::Done;
    }

    default:
      throw std::logic_error("step_navigate_and_place called in " +
                             std::string(to_string(ctx.state)));
  }
}

MissionState step(MissionContext& ctx) {
  const MissionState from = ctx.state;
  MissionState to = from;
  switch (from) {
    case MissionState::Search:
      to = step_search(ctx);
      break;
    case MissionState::Track:
      to = step_track(ctx);
      break;
    case MissionState::Align:
      to = step_align(ctx);
      break;
    case MissionState::Grasp:
    case MissionState::Store:
      to = step_grasp(ctx);
      break;
    case MissionState::Navigate:
    case MissionState::AlignPlace:
    case MissionState::Place:
    case MissionState::UpdateBook:
      to = step_navigate_and_place(ctx);
      break;
    case MissionState::Done:
    case MissionState::Failed:
      throw std::logic_error("mission already finished");
  }

  BrickRecord& r = ctx.record;
  if (from == MissionState::Track && to == MissionState::Align) {
    r[Module::Searching] = Outcome::Success;
    r[Module::Tracking] = Outcome::Success;
  } else if (from == MissionState::Align && to == MissionState::Grasp) {
    r[Module::Alignment] = Outcome::Success;
  } else if (from == MissionState::Grasp && to == MissionState::Store) {
    r[Module::Grasping] = Outcome::Success;
  } else if (from == MissionState::Place && to == MissionState::UpdateBook) {
    r[Module::Placing] = Outcome::Success;
  } else if (to == MissionState::Failed) {
    r[module_of(from)] = Outcome::Failure;
    abandon_brick(ctx);
  }

  ctx.state = to;
  if (ctx.observer) {
    ctx.observer(ctx, from, to);
  }
  return to;
}

BrickRecord run_brick(MissionContext& ctx) {
  if (ctx.state != MissionState::Search) {
    throw std::logic_error("run_brick must start in Search");
  }
  while (true) {
    const MissionState from = ctx.state;
    const MissionState to = step(ctx);
    if (to == MissionState::Failed) {
      if (ctx.target_index) {
        ctx.consumed.insert(*ctx.target_index);
      }
      ctx.book.drop_entry(ctx.book.current_pattern.size());
    }
    if (to == MissionState::Failed || to == MissionState::Done ||
        (from == MissionState::UpdateBook && to == MissionState::Search)) {
      BrickRecord record = ctx.record;
      ctx.begin_brick();
      return record;
    }
  }
}

}  // namespace brickbot
