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

#include "brickbot/planner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "brickbot/error.hpp"

namespace brickbot {

Pose2D goal_pose_for_grasp(const Pose2D& ugv, const Pose6D& brick, double standoff) {
  if (std::abs(brick.normal_axis.z()) <= 0.9) {
    throw TiltedBrick("brick normal z-component " + std::to_string(brick.normal_axis.z()));
  }
  if (!(standoff >= 0.0 && standoff < 1.0)) {
    throw std::invalid_argument("standoff must be in [0, 1.0)");
  }
  const double cx = brick.centroid.x();
  const double cy = brick.centroid.y();
  double mx = brick.minor_axis.x();
  double my = brick.minor_axis.y();
  const double n = std::hypot(mx, my);
  mx /= n;
  my /= n;

  const double px = cx + standoff * mx;
  const double py = cy + standoff * my;
  const double qx = cx - standoff * mx;
  const double qy = cy - standoff * my;
  const bool plus_side = std::hypot(px - ugv.x, py - ugv.y) <= std::hypot(qx - ugv.x, qy - ugv.y);
  const double gx = plus_side ? px : qx;
  const double gy = plus_side ? py : qy;
  const double heading = standoff > 0.0 ? std::atan2(cy - gy, cx - gx)
                                        : std::atan2(cy - ugv.y, cx - ugv.x);
  return Pose2D(gx, gy, heading);
}

AlignmentPlan plan_alignment(const Pose2D& ugv, const Pose2D& goal, double position_epsilon) {
  AlignmentPlan plan;
  const double dx = goal.x - ugv.x;
  const double dy = goal.y - ugv.y;
  plan.d = std::hypot(dx, dy);
  if (plan.d < position_epsilon) {
    plan.d = 0.0;
    plan.a2 = 0.0;
    plan.a1 = wrap_angle(goal.theta - ugv.theta);
    return plan;
  }
  plan.a2 = wrap_angle(std::atan2(dy, dx) - ugv.theta);
  plan.a1 = wrap_angle(goal.theta - ugv.theta - plan.a2);
  return plan;
}

Pose2D execute_plan(const Pose2D& start, const AlignmentPlan& plan) {
  Pose2D pose = compose(start, Pose2D(0.0, 0.0, plan.a2));
  pose = compose(pose, Pose2D(plan.d, 0.0, 0.0));
  return compose(pose, Pose2D(0.0, 0.0, plan.a1));
}

Pose6D compute_place_pose(const Pose6D& previous_place_pose,
                          std::optional<BrickClass> previous_id, BrickClass target_brick,
                          const PatternBook& book, const BrickCatalog& catalog, double gap) {
  const auto flat = flatten(book.target_pattern);
  const std::size_t k = book.current_pattern.size();
  if (k >= flat.size()) {
    throw PatternExhausted("all " + std::to_string(flat.size()) + " entries are placed");
  }
  if (flat[k] != target_brick) {
    throw std::invalid_argument(std::string("next pattern entry is ") + to_char(flat[k]) +
                                ", not " + to_char(target_brick));
  }
  if (!previous_id) {
    return book.assembly_area;
  }

  const BrickSpec& prev = catalog[*previous_id];
  const BrickSpec& next = catalog[target_brick];
  if (k > 0 && layer_of(book.target_pattern, k) == layer_of(book.target_pattern, k - 1)) {
    Pose6D pose = previous_place_pose;
    pose.centroid += (0.5 * (prev.length + next.length) + gap) * previous_place_pose.major_axis;
    return pose;
  }

  Pose6D pose = book.assembly_area;
  pose.centroid.z() = previous_place_pose.centroid.z() + 0.5 * (prev.height + next.height);
  return pose;
}

}  // namespace brickbot
