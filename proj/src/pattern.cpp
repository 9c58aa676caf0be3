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

#include "brickbot/pattern.hpp"

#include <stdexcept>

namespace brickbot {

std::vector<BrickClass> flatten(const TargetPattern& pattern) {
  std::vector<BrickClass> flat;
  for (const auto& layer : pattern) {
    flat.insert(flat.end(), layer.begin(), layer.end());
  }
  return flat;
}

std::size_t brick_count(const TargetPattern& pattern) {
  std::size_t n = 0;
  for (const auto& layer : pattern) {
    n += layer.size();
  }
  return n;
}

std::size_t layer_of(const TargetPattern& pattern, std::size_t k) {
  for (std::size_t layer = 0; layer < pattern.size(); ++layer) {
    if (k < pattern[layer].size()) {
      return layer;
    }
    k -= pattern[layer].size();
  }
  throw std::out_of_range("brick index beyond the pattern");
}

PatternBook PatternBook::start(TargetPattern target, const Pose6D& assembly_area) {
  PatternBook book;
  book.target_pattern = std::move(target);
  book.previous_place_pose = assembly_area;
  book.assembly_area = assembly_area;
  return book;
}

bool PatternBook::invariant_holds() const {
  const auto flat = flatten(target_pattern);
  if (current_pattern.size() > flat.size()) {
    return false;
  }
  for (std::size_t i = 0; i < current_pattern.size(); ++i) {
    if (current_pattern[i] != flat[i]) {
      return false;
    }
  }
  return previous_brick_id.has_value() == !current_pattern.empty();
}

void PatternBook::record_placement(BrickClass placed, const Pose6D& place_pose) {
  current_pattern.push_back(placed);
  previous_brick_id = placed;
  previous_place_pose = place_pose;
}

void PatternBook::drop_entry(std::size_t k) {
  if (k < current_pattern.size()) {
    throw std::logic_error("cannot drop an entry that is already placed");
  }
  for (auto& layer : target_pattern) {
    if (k < layer.size()) {
      layer.erase(layer.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    }
    k -= layer.size();
  }
  std::erase_if(target_pattern, [](const auto& layer) { return layer.empty(); });
}

std::optional<BrickClass> next_target_brick(const PatternBook& book) {
  const auto flat = flatten(book.target_pattern);
  if (book.current_pattern.size() >= flat.size()) {
    return std::nullopt;
  }
  return flat[book.current_pattern.size()];
}

}  // namespace brickbot
