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
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "brickbot/brick.hpp"
#include "brickbot/control.hpp"
#include "brickbot/geometry.hpp"
#include "brickbot/pattern.hpp"
#include "brickbot/perception.hpp"
#include "brickbot/planner.hpp"
#include "brickbot/world.hpp"

namespace brickbot {

enum class MissionState {
  Search,
  Track,
  Align,
  Grasp,
  Store,
  Navigate,
  AlignPlace,
  Place,
  UpdateBook,
  Done,
  Failed,
};

std::string_view to_string(MissionState s);

/// The edges of the mission graph. Anything else is a bug.
bool is_allowed_transition(MissionState from, MissionState to);

/// Evaluation modules in pipeline order.
enum class Module { Searching = 0, Tracking, Alignment, Grasping, Placing };
inline constexpr std::size_t kModuleCount = 5;
inline constexpr std::array<Module, kModuleCount> kModules{
    Module::Searching, Module::Tracking, Module::Alignment, Module::Grasping, Module::Placing};
std::string_view to_string(Module m);

enum class Outcome { NotAttempted, Success, Failure };

/// Outcome ledger entry for one pattern entry.
struct BrickRecord {
  BrickClass brick_class = BrickClass::R;
  std::array<Outcome, kModuleCount> outcomes{};
  std::optional<int> brick_index;
  std::optional<Pose6D> place_pose;  // commanded, when the brick was released
  double place_position_error = 0.0;  // m, true vs commanded
  double place_angle_error = 0.0;     // rad

  Outcome& operator[](Module m) { return outcomes[static_cast<std::size_t>(m)]; }
  Outcome operator[](Module m) const { return outcomes[static_cast<std::size_t>(m)]; }

  /// Nothing is attempted after a failure, and every module up to the first
  /// failure (or all of them) has been attempted.
  bool conditional_structure_holds() const;
};

/// Believed base poses after each completed alignment, tagged with the
/// class that was being searched for.
class VisitedPoses {
 public:
  explicit VisitedPoses(double exclusion_radius = 1.0) : exclusion_radius_(exclusion_radius) {}

  void add(const Pose2D& pose, BrickClass brick_class);
  bool excludes(double x, double y, BrickClass brick_class) const;
  std::size_t size() const { return entries_.size(); }
  double exclusion_radius() const { return exclusion_radius_; }

 private:
  std::vector<std::pair<Pose2D, BrickClass>> entries_;
  double exclusion_radius_;
};

struct TrackingGains {
  double k_lat = 4.0;             // fraction of v_max per normalized pixel offset
  double k_fwd = 0.2;             // 1/s
  double slow_range = 3.0;        // m, deceleration starts here
  double stop_threshold = 2.75;   // m
  double lost_timeout = 2.0;      // s
};

struct MissionConfig {
  CameraModel camera;
  CloudGrid cloud_grid;
  double perception_sigma = 0.005;
  double miss_probability = 0.0;

  double v_max_linear = 0.5;
  double v_max_angular = 0.5;
  FollowOptions follow;

  TrackingGains tracking;

  double search_rotation = std::numbers::pi / 4.0;
  int rotations_per_revolution = 8;
  double exploration_step = 2.0;
  int max_search_steps = 20;

  double align_range_min = 2.0;
  double align_range_max = 3.5;

  PlannerConfig planner;
  GripperModel gripper;
  double depth_increment = 0.001;
  /// Body-frame pose of a brick on the vehicle deck.
  Pose6D stow_pose = Pose6D::from_yaw(Vec3(-0.3, 0.0, 0.6), 0.0);

  /// Freeze model used while aligning to a pile brick.
  LocalizationModel align_localization;
  /// Freeze model used from leaving the pile until the brick is released.
  LocalizationModel place_localization;
  /// Search, tracking, and on-deck stow; drift applies but no new freezes.
  LocalizationModel quiet_localization;

  double max_position_error = 0.10;
  double max_heading_error = 5.0 * std::numbers::pi / 180.0;
  double exclusion_radius = 1.0;
  /// Simulated time budget for one pattern entry.
  double max_brick_time = 3600.0;

  BrickCatalog catalog;

  double dt() const { return follow.dt; }
};

/// Last motion primitive the mission commanded (rad for rotations).
struct CommandedMotion {
  enum class Kind { None, Rotate, Forward, Velocity } kind = Kind::None;
  double amount = 0.0;
  MotionCommand velocity;
};

struct MissionContext;
using TransitionObserver =
    std::function<void(const MissionContext&, MissionState from, MissionState to)>;

/// Everything one mission executor owns for one round.
struct MissionContext {
  MissionContext(WorldState& world_, PatternBook& book_, const MissionConfig& config_);

  WorldState& world;
  PatternBook& book;
  const MissionConfig& config;
  VisitedPoses visited;
  MissionState state = MissionState::Search;

  // Current pattern entry.
  std::optional<BrickClass> target_class;
  std::optional<int> target_index;
  BrickRecord record;
  int search_misses = 0;
  int exploration_moves = 0;
  double lost_time = 0.0;
  double brick_start_time = 0.0;
  std::optional<Pose2D> align_goal;
  std::optional<Pose6D> anchor_pose;
  std::optional<Pose6D> pending_place_pose;

  // Round-wide.
  std::optional<int> last_placed_index;
  std::set<int> consumed;  // bricks abandoned after a failed attempt
  CommandedMotion last_motion;
  TransitionObserver observer;

  /// Prepares the context for the next unplaced pattern entry.
  void begin_brick();
};

/// Body-frame velocity the tracker commands for an observation.
MotionCommand track_command(const TargetTrack& track, const MissionConfig& config);

/// Presses until the reading exceeds `threshold`; returns the number of
/// presses. `press` throws (e.g. MaxDepthExceeded) to abort.
int press_until_threshold(const std::function<double()>& press, double threshold);

/// Executes one follow() per non-trivial segment of the plan on the world.
/// Throws FeedbackStalled.
void execute_alignment(MissionContext& ctx, const AlignmentPlan& plan,
                       const LocalizationModel& model);

MissionState step_search(MissionContext& ctx);
/// Runs the approach until the stop range (Align) or until the target is
/// lost for longer than the timeout (Search).
MissionState step_track(MissionContext& ctx);
MissionState step_align(MissionContext& ctx);
/// Grasp and Store.
MissionState step_grasp(MissionContext& ctx);
/// Navigate, AlignPlace, Place and UpdateBook.
MissionState step_navigate_and_place(MissionContext& ctx);

/// Runs one step of whatever state the context is in and notifies the
/// observer.
MissionState step(MissionContext& ctx);

/// Runs the current pattern entry until it is placed (UpdateBook) or fails.
/// On failure the carried brick is dropped, the target brick is consumed and
/// the entry is removed from the book. Either way the context is left at
/// the next entry (Search) or Done.
BrickRecord run_brick(MissionContext& ctx);

}  // namespace brickbot
