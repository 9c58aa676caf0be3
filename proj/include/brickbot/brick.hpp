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
#include <optional>
#include <string_view>

namespace brickbot {

enum class BrickClass { R = 0, G = 1, B = 2, O = 3 };

inline constexpr std::array<BrickClass, 4> kAllBrickClasses{BrickClass::R, BrickClass::G,
                                                           BrickClass::B, BrickClass::O};

char to_char(BrickClass c);
std::optional<BrickClass> brick_class_from_token(std::string_view token);

/// Ferromagnetic grasping patch on the top face of every brick.
inline constexpr double kFerroLength = 0.25;
inline constexpr double kFerroWidth = 0.15;

struct BrickSpec {
  BrickClass brick_class = BrickClass::R;
  double length = 0.30;
  double width = 0.20;
  double height = 0.20;

  /// Throws MalformedValue when the brick cannot carry the ferromagnetic patch.
  void validate() const;
};

/// Dimensions per class. Defaults: R 0.30, G 0.60, B 1.20, O 1.80 m long,
/// all 0.20 x 0.20 m in section.
class BrickCatalog {
 public:
  BrickCatalog();

  const BrickSpec& operator[](BrickClass c) const { return specs_[static_cast<int>(c)]; }
  BrickSpec& operator[](BrickClass c) { return specs_[static_cast<int>(c)]; }

 private:
  std::array<BrickSpec, 4> specs_;
};

}  // namespace brickbot
