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
#include <functional>

namespace brickbot {

/// Body-frame velocity command for the holonomic base.
struct MotionCommand {
  double vx = 0.0;     // m/s, forward
  double vy = 0.0;     // m/s, left
  double omega = 0.0;  // rad/s, counter-clockwise
};

/// Trapezoidal profile over a positive target distance or angle. Speed ramps
/// linearly over the first and last tenth of the target and holds v_max in
/// between.
class VelocityProfile {
 public:
  static constexpr double kRampFraction = 0.1;

  VelocityProfile(double target, double v_max);

  double target() const { return target_; }
  double v_max() const { return v_max_; }

  /// Throws ProgressOutOfRange outside [0, target].
  double velocity_at(double progress) const;

 private:
  double target_;
  double v_max_;
};

enum class MotionAxis { Forward, Lateral, Rotate };

struct FollowOptions {
  double dt = 0.02;
  /// Simulated seconds of unchanged feedback before FeedbackStalled.
  double stall_timeout = 5.0;
  /// Speed floor as a fraction of v_max. The profile is zero at both ends,
  /// so without a floor a progress-indexed profile never starts or finishes.
  double min_speed_fraction = 0.05;
};

struct FollowResult {
  double believed_progress = 0.0;
  double elapsed = 0.0;
  std::size_t steps = 0;
  std::size_t corrections = 0;  // checkpoint replacements applied
};

using ProgressFeedback = std::function<double()>;
using CommandSink = std::function<void(const MotionCommand&)>;

/// Drives one profile to completion. Progress is dead-reckoned from the
/// emitted speeds and replaced by the feedback value whenever it crosses
/// target/10 or 9*target/10. Feedback is polled every step; if it stays
/// bit-identical for `stall_timeout` seconds, throws FeedbackStalled.
/// `direction` is +1 or -1 and sets the sign of the commanded component.
FollowResult follow(const VelocityProfile& profile, MotionAxis axis, double direction,
                    const ProgressFeedback& feedback, const FollowOptions& options,
                    const CommandSink& sink);

}  // namespace brickbot
