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

#include "brickbot/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brickbot/error.hpp"

namespace brickbot {

VelocityProfile::VelocityProfile(double target, double v_max) : target_(target), v_max_(v_max) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw std::invalid_argument("profile target must be positive, got " + std::to_string(target));
  }
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw std::invalid_argument("profile v_max must be positive, got " + std::to_string(v_max));
  }
}

double VelocityProfile::velocity_at(double progress) const {
  if (!(progress >= 0.0 && progress <= target_)) {
    throw ProgressOutOfRange(std::to_string(progress) + " not in [0, " + std::to_string(target_) +
                             "]");
  }
  const double ramp = kRampFraction * target_;
  if (progress < ramp) {
    return v_max_ * progress / ramp;
  }
  if (progress <= target_ - ramp) {
    return v_max_;
  }
  return v_max_ * (target_ - progress) / ramp;
}

FollowResult follow(const VelocityProfile& profile, MotionAxis axis, double direction,
                    const ProgressFeedback& feedback, const FollowOptions& options,
                    const CommandSink& sink) {
  if (!(options.dt > 0.0)) {
    throw std::invalid_argument("follow dt must be positive");
  }
  const double target = profile.target();
  const double lower = VelocityProfile::kRampFraction * target;
  const double upper = target - lower;
  const double v_min = options.min_speed_fraction * profile.v_max();
  const double sign = direction < 0.0 ? -1.0 : 1.0;
  // Generous wall on runaway corrections: four times the crawl-speed duration.
  const double max_elapsed = options.stall_timeout + 4.0 * target / std::max(v_min, 1e-9);

  FollowResult result;
  double last_feedback = feedback();
  double last_change = 0.0;
  bool lower_armed = true;
  bool upper_armed = true;

  while (result.believed_progress < target) {
    double speed = std::max(profile.velocity_at(result.believed_progress), v_min);
    speed = std::min(speed, (target - result.believed_progress) / options.dt);

    MotionCommand cmd;
    switch (axis) {
      case MotionAxis::Forward:
        cmd.vx = sign * speed;
        break;
      case MotionAxis::Lateral:
        cmd.vy = sign * speed;
        break;
      case MotionAxis::Rotate:
        cmd.omega = sign * speed;
        break;
    }
    sink(cmd);
    result.believed_progress += speed * options.dt;
    result.elapsed += options.dt;
    ++result.steps;

    const double measured = feedback();
    if (measured != last_feedback) {
      last_feedback = measured;
      last_change = result.elapsed;
    } else if (result.elapsed - last_change >= options.stall_timeout) {
      throw FeedbackStalled("no localization update for " + std::to_string(options.stall_timeout) +
                            " s");
    }

    if (lower_armed && result.believed_progress >= lower) {
      result.believed_progress = std::clamp(measured, 0.0, target);
      lower_armed = false;
      ++result.corrections;
    }
    if (upper_armed && result.believed_progress >= upper) {
      result.believed_progress = std::clamp(measured, 0.0, target);
      upper_armed = false;
      ++result.corrections;
    }
    // A correction that moves progress back below a checkpoint re-arms it.
    lower_armed = lower_armed || result.believed_progress < lower;
    upper_armed = upper_armed || result.believed_progress < upper;

    if (result.elapsed > max_elapsed) {
      throw FeedbackStalled("motion did not complete within " + std::to_string(max_elapsed) + " s");
    }
  }
  return result;
}

}  // namespace brickbot
