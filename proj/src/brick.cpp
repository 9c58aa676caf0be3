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

#include "brickbot/brick.hpp"

#include <string>

#include "brickbot/error.hpp"

namespace brickbot {

char to_char(BrickClass c) {
  switch (c) {
    case BrickClass::R:
      return 'R';
    case BrickClass::G:
      return 'G';
    case BrickClass::B:
      return 'B';
    case BrickClass::O:
      return 'O';
  }
  return '?';
}

std::optional<BrickClass> brick_class_from_token(std::string_view token) {
  if (token == "R") return BrickClass::R;
  if (token == "G") return BrickClass::G;
  if (token == "B") return BrickClass::B;
  if (token == "O") return BrickClass::O;
  return std::nullopt;
}

void BrickSpec::validate() const {
  const std::string name(1, to_char(brick_class));
  if (!(length > 0.0 && width > 0.0 && height > 0.0)) {
    throw MalformedValue("brick " + name + " dimensions must be positive");
  }
  if (length < kFerroLength || width < kFerroWidth) {
    throw MalformedValue("brick " + name + " is smaller than the 0.25 x 0.15 m grasp patch");
  }
}

BrickCatalog::BrickCatalog() {
  specs_[0] = {BrickClass::R, 0.30, 0.20, 0.20};
  specs_[1] = {BrickClass::G, 0.60, 0.20, 0.20};
  specs_[2] = {BrickClass::B, 1.20, 0.20, 0.20};
  specs_[3] = {BrickClass::O, 1.80, 0.20, 0.20};
}

}  // namespace brickbot
