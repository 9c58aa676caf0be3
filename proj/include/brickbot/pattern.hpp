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

#include <cstddef>
#include <optional>
#include <vector>

#include "brickbot/brick.hpp"
#include "brickbot/geometry.hpp"

namespace brickbot {

/// Wall layout: one layer per entry, bottom layer first.
using TargetPattern = std::vector<std::vector<BrickClass>>;

std::vector<BrickClass> flatten(const TargetPattern& pattern);
std::size_t brick_count(const TargetPattern& pattern);
/// Layer index of the k-th brick in layer order. Requires k < brick_count.
std::size_t layer_of(const TargetPattern& pattern, std::size_t k);

/// Mission bookkeeping: what should be built, what has been placed, and the
/// pose of the last placed brick (initially the assembly-area pose).
struct PatternBook {
  TargetPattern target_pattern;
  std::vector<BrickClass> current_pattern;
  std::optional<BrickClass> previous_brick_id;
  Pose6D previous_place_pose;
  Pose6D assembly_area;

  static PatternBook start(TargetPattern target, const Pose6D& assembly_area);

  /// current_pattern is a prefix of the flattened target, and
  /// previous_brick_id is set exactly when something has been placed.
  bool invariant_holds() const;

  /// Records a placed brick.
  void record_placement(BrickClass placed, const Pose6D& place_pose);

  /// Removes the not-yet-placed entry at flattened index k (used when a
  /// brick fails and its slot is abandoned for the round).
  void drop_entry(std::size_t k);
};

/// First unplaced entry of the flattened target, or nothing when complete.
std::optional<BrickClass> next_target_brick(const PatternBook& book);

}  // namespace brickbot
