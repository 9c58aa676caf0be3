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

#include "brickbot/brick.hpp"
#include "brickbot/geometry.hpp"
#include "brickbot/pattern.hpp"

namespace brickbot {

/// Rotate by a2, drive forward d, rotate by a1.
struct AlignmentPlan {
  double a2 = 0.0;
  double d = 0.0;
  double a1 = 0.0;
};

struct PlannerConfig {
  double standoff = 0.7;            // m, must stay inside the 1.0 m arm reach
  double gap = 0.0;                 // m between abutting bricks
  double position_epsilon = 1e-6;   // m
};

/// Base pose `standoff` meters from the brick centroid along the horizontal
/// minor axis, on the side nearer the vehicle, facing the centroid.
/// Throws TiltedBrick when the brick normal is not within ~25 deg of vertical.
Pose2D goal_pose_for_grasp(const Pose2D& ugv, const Pose6D& brick, double standoff);

AlignmentPlan plan_alignment(const Pose2D& ugv, const Pose2D& goal,
                             double position_epsilon = PlannerConfig{}.position_epsilon);

/// Pose reached by executing `plan` exactly from `start`.
Pose2D execute_plan(const Pose2D& start, const AlignmentPlan& plan);

/// Where the next brick goes, given the anchor pose of the previous one.
///  - nothing placed yet: the assembly-area pose
///  - same layer: abut along the previous major axis
///  - new layer: assembly-area x/y and axes, one brick height up
/// Throws PatternExhausted when the pattern is already complete.
Pose6D compute_place_pose(const Pose6D& previous_place_pose,
                          std::optional<BrickClass> previous_id, BrickClass target_brick,
                          const PatternBook& book, const BrickCatalog& catalog, double gap = 0.0);

}  // namespace brickbot
