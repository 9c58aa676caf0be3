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

#include "brickbot/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <random>
#include <thread>

#include "brickbot/error.hpp"

namespace brickbot {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw MalformedValue(std::string(key) + " = '" + std::string(value) + "' is not a number");
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw MalformedValue(std::string(key) + " = '" + std::string(value) + "' is not an integer");
  }
  return out;
}

double require_positive(std::string_view key, double v) {
  if (!(v > 0.0)) {
    throw MalformedValue(std::string(key) + " must be positive");
  }
  return v;
}

double require_non_negative(std::string_view key, double v) {
  if (!(v >= 0.0)) {
    throw MalformedValue(std::string(key) + " must be non-negative");
  }
  return v;
}

double require_probability(std::string_view key, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw MalformedValue(std::string(key) + " must be in [0, 1]");
  }
  return v;
}

// Inline pattern: layers separated by '/', e.g. "R G / B".
TargetPattern parse_inline_pattern(std::string_view value) {
  std::string text(value);
  std::replace(text.begin(), text.end(), '/', '\n');
  return parse_pattern_file(text);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::array<int, 4> class_counts(const std::vector<BrickClass>& flat) {
  std::array<int, 4> counts{};
  for (auto c : flat) ++counts[static_cast<int>(c)];
  return counts;
}

std::array<int, 4> pile_supply(const std::vector<PileSpec>& piles) {
  std::array<int, 4> supply{};
  for (const auto& p : piles) supply[static_cast<int>(p.brick_class)] += p.count;
  return supply;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto num = [&t](const std::string& key, std::function<void(ScenarioConfig&, double)> set) {
      t[key] = [set](ScenarioConfig& c, std::string_view k, std::string_view v) {
        set(c, parse_double(k, v));
      };
    };
    auto positive = [&num](const std::string& key, std::function<double&(ScenarioConfig&)> field) {
      num(key, [key, field](ScenarioConfig& c, double v) { field(c) = require_positive(key, v); });
    };
    auto non_negative = [&num](const std::string& key,
                               std::function<double&(ScenarioConfig&)> field) {
      num(key,
          [key, field](ScenarioConfig& c, double v) { field(c) = require_non_negative(key, v); });
    };
    auto integer = [&t](const std::string& key, int min, std::function<int&(ScenarioConfig&)> field) {
      t[key] = [key, min, field](ScenarioConfig& c, std::string_view k, std::string_view v) {
        const int n = parse_int<int>(k, v);
        if (n < min) {
          throw MalformedValue(key + " must be at least " + std::to_string(min));
        }
        field(c) = n;
      };
    };

    t["seed"] = [](ScenarioConfig& c, std::string_view k, std::string_view v) {
      c.seed = parse_int<std::uint64_t>(k, v);
    };
    integer("rounds", 1, [](ScenarioConfig& c) -> int& { return c.rounds; });
    integer("threads", 1, [](ScenarioConfig& c) -> int& { return c.threads; });
    t["pattern"] = [](ScenarioConfig& c, std::string_view, std::string_view v) {
      c.pattern = parse_inline_pattern(v);
      c.pattern_path.clear();
    };
    t["pattern_path"] = [](ScenarioConfig& c, std::string_view, std::string_view v) {
      c.pattern_path = std::string(v);
    };
    integer("pattern.min_length", 1, [](ScenarioConfig& c) -> int& { return c.pattern_min_length; });
    integer("pattern.max_length", 1, [](ScenarioConfig& c) -> int& { return c.pattern_max_length; });

    positive("dt", [](ScenarioConfig& c) -> double& { return c.mission.follow.dt; });
    positive("follow.stall_timeout",
             [](ScenarioConfig& c) -> double& { return c.mission.follow.stall_timeout; });
    num("follow.min_speed_fraction", [](ScenarioConfig& c, double v) {
      if (!(v > 0.0 && v < VelocityProfile::kRampFraction)) {
        throw MalformedValue("follow.min_speed_fraction must be in (0, 0.1)");
      }
      c.mission.follow.min_speed_fraction = v;
    });
    positive("v_max.linear", [](ScenarioConfig& c) -> double& { return c.mission.v_max_linear; });
    positive("v_max.angular", [](ScenarioConfig& c) -> double& { return c.mission.v_max_angular; });

    non_negative("perception.sigma",
                 [](ScenarioConfig& c) -> double& { return c.mission.perception_sigma; });
    num("perception.miss_probability", [](ScenarioConfig& c, double v) {
      c.mission.miss_probability = require_probability("perception.miss_probability", v);
    });
    num("camera.fov_deg", [](ScenarioConfig& c, double v) { c.mission.camera.horizontal_fov = v * kDeg; });
    positive("camera.max_range", [](ScenarioConfig& c) -> double& { return c.mission.camera.max_range; });
    integer("camera.image_width", 1, [](ScenarioConfig& c) -> int& { return c.mission.camera.image_width; });
    integer("camera.image_height", 1, [](ScenarioConfig& c) -> int& { return c.mission.camera.image_height; });
    num("camera.mount_x", [](ScenarioConfig& c, double v) { c.mission.camera.mount.x = v; });
    num("camera.mount_y", [](ScenarioConfig& c, double v) { c.mission.camera.mount.y = v; });
    num("camera.mount_yaw_deg", [](ScenarioConfig& c, double v) {
      c.mission.camera.mount.theta = wrap_angle(v * kDeg);
    });
    non_negative("camera.mount_height",
                 [](ScenarioConfig& c) -> double& { return c.mission.camera.mount_height; });
    integer("cloud.rows", 2, [](ScenarioConfig& c) -> int& { return c.mission.cloud_grid.rows; });
    integer("cloud.cols", 2, [](ScenarioConfig& c) -> int& { return c.mission.cloud_grid.cols; });

    positive("track.k_lat", [](ScenarioConfig& c) -> double& { return c.mission.tracking.k_lat; });
    positive("track.k_fwd", [](ScenarioConfig& c) -> double& { return c.mission.tracking.k_fwd; });
    positive("track.slow_range", [](ScenarioConfig& c) -> double& { return c.mission.tracking.slow_range; });
    positive("track.stop_threshold",
             [](ScenarioConfig& c) -> double& { return c.mission.tracking.stop_threshold; });
    positive("track.lost_timeout",
             [](ScenarioConfig& c) -> double& { return c.mission.tracking.lost_timeout; });

    num("search.rotation_deg", [](ScenarioConfig& c, double v) {
      c.mission.search_rotation = require_positive("search.rotation_deg", v) * kDeg;
    });
    integer("search.rotations_per_revolution", 1,
            [](ScenarioConfig& c) -> int& { return c.mission.rotations_per_revolution; });
    positive("search.exploration_step",
             [](ScenarioConfig& c) -> double& { return c.mission.exploration_step; });
    integer("search.max_search_steps", 0,
            [](ScenarioConfig& c) -> int& { return c.mission.max_search_steps; });

    num("planner.standoff", [](ScenarioConfig& c, double v) {
      if (!(v >= 0.0 && v < 1.0)) {
        throw MalformedValue("planner.standoff must be in [0, 1.0)");
      }
      c.mission.planner.standoff = v;
    });
    non_negative("planner.gap", [](ScenarioConfig& c) -> double& { return c.mission.planner.gap; });
    positive("planner.position_epsilon",
             [](ScenarioConfig& c) -> double& { return c.mission.planner.position_epsilon; });

    positive("gripper.k_foam", [](ScenarioConfig& c) -> double& { return c.mission.gripper.k_foam; });
    non_negative("gripper.contact_depth",
                 [](ScenarioConfig& c) -> double& { return c.mission.gripper.contact_depth; });
    positive("gripper.max_depth", [](ScenarioConfig& c) -> double& { return c.mission.gripper.max_depth; });
    positive("gripper.force_threshold",
             [](ScenarioConfig& c) -> double& { return c.mission.gripper.force_threshold; });
    num("gripper.tilt_tolerance_deg", [](ScenarioConfig& c, double v) {
      c.mission.gripper.tilt_tolerance = require_non_negative("gripper.tilt_tolerance_deg", v) * kDeg;
    });
    positive("gripper.depth_increment",
             [](ScenarioConfig& c) -> double& { return c.mission.depth_increment; });
    positive("gripper.arm_reach", [](ScenarioConfig& c) -> double& { return c.mission.gripper.arm_reach; });

    num("localization.freeze_per_meter", [](ScenarioConfig& c, double v) {
      v = require_probability("localization.freeze_per_meter", v);
      c.mission.align_localization.freeze_probability_per_meter = v;
      c.mission.place_localization.freeze_probability_per_meter = v;
    });
    num("localization.freeze_per_meter.align", [](ScenarioConfig& c, double v) {
      c.mission.align_localization.freeze_probability_per_meter =
          require_probability("localization.freeze_per_meter.align", v);
    });
    num("localization.freeze_per_meter.place", [](ScenarioConfig& c, double v) {
      c.mission.place_localization.freeze_probability_per_meter =
          require_probability("localization.freeze_per_meter.place", v);
    });
    num("localization.freeze_duration", [](ScenarioConfig& c, double v) {
      v = require_non_negative("localization.freeze_duration", v);
      c.mission.align_localization.freeze_duration = v;
      c.mission.place_localization.freeze_duration = v;
      c.mission.quiet_localization.freeze_duration = v;
    });
    num("localization.drift_sigma", [](ScenarioConfig& c, double v) {
      v = require_non_negative("localization.drift_sigma", v);
      c.mission.align_localization.drift_sigma = v;
      c.mission.place_localization.drift_sigma = v;
      c.mission.quiet_localization.drift_sigma = v;
    });

    positive("scoring.max_position_error",
             [](ScenarioConfig& c) -> double& { return c.mission.max_position_error; });
    num("scoring.max_heading_error_deg", [](ScenarioConfig& c, double v) {
      c.mission.max_heading_error = require_positive("scoring.max_heading_error_deg", v) * kDeg;
    });
    positive("mission.exclusion_radius",
             [](ScenarioConfig& c) -> double& { return c.mission.exclusion_radius; });
    positive("mission.max_brick_time",
             [](ScenarioConfig& c) -> double& { return c.mission.max_brick_time; });

    for (BrickClass cls : kAllBrickClasses) {
      const std::string prefix = std::string("brick.") + to_char(cls) + ".";
      positive(prefix + "length", [cls](ScenarioConfig& c) -> double& { return c.mission.catalog[cls].length; });
      positive(prefix + "width", [cls](ScenarioConfig& c) -> double& { return c.mission.catalog[cls].width; });
      positive(prefix + "height", [cls](ScenarioConfig& c) -> double& { return c.mission.catalog[cls].height; });
    }

    non_negative("pile.position_jitter",
                 [](ScenarioConfig& c) -> double& { return c.pile_position_jitter; });
    num("pile.yaw_jitter_deg", [](ScenarioConfig& c, double v) {
      c.pile_yaw_jitter = require_non_negative("pile.yaw_jitter_deg", v) * kDeg;
    });
    integer("pile.columns", 1, [](ScenarioConfig& c) -> int& { return c.pile_columns; });
    positive("pile.row_spacing", [](ScenarioConfig& c) -> double& { return c.pile_row_spacing; });
    non_negative("pile.gap", [](ScenarioConfig& c) -> double& { return c.pile_gap; });
    num("pile.tilt_deg", [](ScenarioConfig& c, double v) {
      c.pile_tilt = require_non_negative("pile.tilt_deg", v) * kDeg;
    });

    num("assembly.x", [](ScenarioConfig& c, double v) { c.assembly_area.centroid.x() = v; });
    num("assembly.y", [](ScenarioConfig& c, double v) { c.assembly_area.centroid.y() = v; });
    num("assembly.z", [](ScenarioConfig& c, double v) { c.assembly_area.centroid.z() = v; });
    num("assembly.yaw_deg", [](ScenarioConfig& c, double v) {
      c.assembly_area = Pose6D::from_yaw(c.assembly_area.centroid, v * kDeg);
    });
    num("ugv.start_x", [](ScenarioConfig& c, double v) { c.ugv_start.x = v; });
    num("ugv.start_y", [](ScenarioConfig& c, double v) { c.ugv_start.y = v; });
    num("ugv.start_yaw_deg", [](ScenarioConfig& c, double v) { c.ugv_start.theta = wrap_angle(v * kDeg); });
    return t;
  }();
  return table;
}

PileSpec parse_pile(std::string_view value) {
  const auto tokens = split_ws(value);
  if (tokens.size() != 5) {
    throw MalformedValue("pile = '" + std::string(value) + "' needs: <class> <count> <x> <y> <yaw_deg>");
  }
  PileSpec pile;
  const auto cls = brick_class_from_token(tokens[0]);
  if (!cls) {
    throw MalformedValue("pile class '" + std::string(tokens[0]) + "' is not one of R G B O");
  }
  pile.brick_class = *cls;
  pile.count = parse_int<int>("pile", tokens[1]);
  if (pile.count < 1) {
    throw MalformedValue("pile count must be at least 1");
  }
  pile.x = parse_double("pile", tokens[2]);
  pile.y = parse_double("pile", tokens[3]);
  pile.yaw = wrap_angle(parse_double("pile", tokens[4]) * kDeg);
  return pile;
}

std::string format_number(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

TargetPattern parse_pattern_file(std::string_view text) {
  TargetPattern pattern;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    const std::string_view line = strip_comment(raw);
    std::vector<BrickClass> layer;
    for (const auto token : split_ws(line)) {
      const auto cls = brick_class_from_token(token);
      if (!cls) {
        const auto column = static_cast<std::size_t>(token.data() - line.data()) + 1;
        throw InvalidToken(line_no, column, std::string(token));
      }
      layer.push_back(*cls);
    }
    if (!layer.empty()) {
      pattern.push_back(std::move(layer));
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  if (pattern.empty()) {
    throw EmptyPattern("pattern has no bricks");
  }
  return pattern;
}

ScenarioConfig::ScenarioConfig() {
  piles = {
      {BrickClass::R, 8, 14.0, 6.0, 0.3},
      {BrickClass::G, 8, 16.0, -6.0, -0.4},
      {BrickClass::B, 8, 11.0, -13.0, 0.8},
  };
  // Fitted with `brickbot calibrate` against data/overall_system_evaluation.tsv.
  mission.align_localization.freeze_probability_per_meter = 0.0588208;
  mission.place_localization.freeze_probability_per_meter = 0.0211838;
}

void ScenarioConfig::validate() const {
  if (rounds < 1) {
    throw MalformedValue("rounds must be at least 1");
  }
  if (pattern_min_length > pattern_max_length) {
    throw MalformedValue("pattern.min_length exceeds pattern.max_length");
  }
  for (BrickClass cls : kAllBrickClasses) {
    mission.catalog[cls].validate();
  }
  mission.camera.validate();
  mission.align_localization.validate();
  mission.place_localization.validate();
  if (piles.empty()) {
    throw UnsatisfiablePile("no piles configured");
  }
  const auto supply = pile_supply(piles);
  if (pattern) {
    const auto demand = class_counts(flatten(*pattern));
    for (BrickClass cls : kAllBrickClasses) {
      const int i = static_cast<int>(cls);
      if (demand[i] > supply[i]) {
        throw UnsatisfiablePile("pattern needs " + std::to_string(demand[i]) + " " + to_char(cls) +
                                " bricks, piles hold " + std::to_string(supply[i]));
      }
    }
  } else {
    int total = 0;
    for (int s : supply) total += s;
    if (total < pattern_max_length) {
      throw UnsatisfiablePile("piles hold " + std::to_string(total) + " bricks, patterns need up to " +
                              std::to_string(pattern_max_length));
    }
  }
}

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ScenarioConfig config;
  bool custom_piles = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw MalformedValue("line " + std::to_string(line_no) + ": expected key = value");
      }
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      if (key == "pile") {
        if (!custom_piles) {
          config.piles.clear();
          custom_piles = true;
        }
        config.piles.push_back(parse_pile(value));
      } else {
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) {
          throw UnknownKey("'" + std::string(key) + "' on line " + std::to_string(line_no));
        }
        it->second(config, key, value);
      }
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  if (!config.pattern_path.empty()) {
    std::filesystem::path p(config.pattern_path);
    if (p.is_relative()) {
      p = base_dir / p;
    }
    config.pattern = parse_pattern_file(read_file(p));
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string default_config_text() {
  const ScenarioConfig c;
  const MissionConfig& m = c.mission;
  std::ostringstream out;
  auto kv = [&out](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
  auto kd = [&](const std::string& k, double v) { kv(k, format_number(v)); };
  kv("seed", std::to_string(c.seed));
  kv("rounds", std::to_string(c.rounds));
  kv("threads", std::to_string(c.threads));
  kv("pattern.min_length", std::to_string(c.pattern_min_length));
  kv("pattern.max_length", std::to_string(c.pattern_max_length));
  kd("dt", m.follow.dt);
  kd("follow.stall_timeout", m.follow.stall_timeout);
  kd("follow.min_speed_fraction", m.follow.min_speed_fraction);
  kd("v_max.linear", m.v_max_linear);
  kd("v_max.angular", m.v_max_angular);
  kd("perception.sigma", m.perception_sigma);
  kd("perception.miss_probability", m.miss_probability);
  kd("camera.fov_deg", m.camera.horizontal_fov / kDeg);
  kd("camera.max_range", m.camera.max_range);
  kv("camera.image_width", std::to_string(m.camera.image_width));
  kv("camera.image_height", std::to_string(m.camera.image_height));
  kd("camera.mount_x", m.camera.mount.x);
  kd("camera.mount_y", m.camera.mount.y);
  kd("camera.mount_yaw_deg", m.camera.mount.theta / kDeg);
  kd("camera.mount_height", m.camera.mount_height);
  kv("cloud.rows", std::to_string(m.cloud_grid.rows));
  kv("cloud.cols", std::to_string(m.cloud_grid.cols));
  kd("track.k_lat", m.tracking.k_lat);
  kd("track.k_fwd", m.tracking.k_fwd);
  kd("track.slow_range", m.tracking.slow_range);
  kd("track.stop_threshold", m.tracking.stop_threshold);
  kd("track.lost_timeout", m.tracking.lost_timeout);
  kd("search.rotation_deg", m.search_rotation / kDeg);
  kv("search.rotations_per_revolution", std::to_string(m.rotations_per_revolution));
  kd("search.exploration_step", m.exploration_step);
  kv("search.max_search_steps", std::to_string(m.max_search_steps));
  kd("planner.standoff", m.planner.standoff);
  kd("planner.gap", m.planner.gap);
  kd("planner.position_epsilon", m.planner.position_epsilon);
  kd("gripper.k_foam", m.gripper.k_foam);
  kd("gripper.contact_depth", m.gripper.contact_depth);
  kd("gripper.max_depth", m.gripper.max_depth);
  kd("gripper.force_threshold", m.gripper.force_threshold);
  kd("gripper.tilt_tolerance_deg", m.gripper.tilt_tolerance / kDeg);
  kd("gripper.depth_increment", m.depth_increment);
  kd("gripper.arm_reach", m.gripper.arm_reach);
  kd("localization.freeze_per_meter.align", m.align_localization.freeze_probability_per_meter);
  kd("localization.freeze_per_meter.place", m.place_localization.freeze_probability_per_meter);
  kd("localization.freeze_duration", m.align_localization.freeze_duration);
  kd("localization.drift_sigma", m.align_localization.drift_sigma);
  kd("scoring.max_position_error", m.max_position_error);
  kd("scoring.max_heading_error_deg", m.max_heading_error / kDeg);
  kd("mission.exclusion_radius", m.exclusion_radius);
  kd("mission.max_brick_time", m.max_brick_time);
  for (BrickClass cls : kAllBrickClasses) {
    const std::string prefix = std::string("brick.") + to_char(cls) + ".";
    kd(prefix + "length", m.catalog[cls].length);
    kd(prefix + "width", m.catalog[cls].width);
    kd(prefix + "height", m.catalog[cls].height);
  }
  for (const auto& p : c.piles) {
    kv("pile", std::string(1, to_char(p.brick_class)) + " " + std::to_string(p.count) + " " +
                   format_number(p.x) + " " + format_number(p.y) + " " + format_number(p.yaw / kDeg));
  }
  kd("pile.position_jitter", c.pile_position_jitter);
  kd("pile.yaw_jitter_deg", c.pile_yaw_jitter / kDeg);
  kv("pile.columns", std::to_string(c.pile_columns));
  kd("pile.row_spacing", c.pile_row_spacing);
  kd("pile.gap", c.pile_gap);
  kd("pile.tilt_deg", c.pile_tilt / kDeg);
  kd("assembly.x", c.assembly_area.centroid.x());
  kd("assembly.y", c.assembly_area.centroid.y());
  kd("assembly.z", c.assembly_area.centroid.z());
  kd("assembly.yaw_deg", c.assembly_area.yaw() / kDeg);
  kd("ugv.start_x", c.ugv_start.x);
  kd("ugv.start_y", c.ugv_start.y);
  kd("ugv.start_yaw_deg", c.ugv_start.theta / kDeg);
  return out.str();
}

std::uint64_t round_seed(std::uint64_t seed, int round_index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(round_index)));
}

RoundSetup build_round(const ScenarioConfig& config, int round_index) {
  const std::uint64_t seed = round_seed(config.seed, round_index);
  std::mt19937_64 layout_rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::vector<Brick> bricks;
  std::array<int, 4> supply{};
  int next_index = 0;
  for (const auto& pile : config.piles) {
    const double cx = pile.x + config.pile_position_jitter * unit(layout_rng);
    const double cy = pile.y + config.pile_position_jitter * unit(layout_rng);
    const double yaw = wrap_angle(pile.yaw + config.pile_yaw_jitter * unit(layout_rng));
    const BrickSpec& spec = config.mission.catalog[pile.brick_class];
    const Pose6D frame = Pose6D::from_yaw(Vec3(cx, cy, 0.0), yaw);
    const double pitch = config.pile_tilt;
    for (int i = 0; i < pile.count; ++i) {
      const int col = i % config.pile_columns;
      const int row = i / config.pile_columns;
      const double along = (col - 0.5 * (config.pile_columns - 1)) * (spec.length + config.pile_gap);
      const double across = row * config.pile_row_spacing;
      Brick b;
      b.index = next_index++;
      b.spec = spec;
      b.pose = frame;
      b.pose.centroid =
          frame.centroid + along * frame.major_axis + across * frame.minor_axis + Vec3(0, 0, 0.5 * spec.height);
      if (pitch > 0.0) {
        // Tilt the top face about the brick's major axis.
        b.pose.normal_axis = std::cos(pitch) * frame.normal_axis - std::sin(pitch) * frame.minor_axis;
        b.pose.minor_axis = b.pose.normal_axis.cross(b.pose.major_axis);
      }
      bricks.push_back(b);
    }
    supply[static_cast<int>(pile.brick_class)] += pile.count;
  }

  TargetPattern pattern;
  if (config.pattern) {
    pattern = *config.pattern;
  } else {
    std::uniform_int_distribution<int> length(config.pattern_min_length, config.pattern_max_length);
    const int n = length(layout_rng);
    std::vector<BrickClass> flat;
    for (int i = 0; i < n; ++i) {
      std::vector<BrickClass> available;
      for (BrickClass cls : kAllBrickClasses) {
        if (supply[static_cast<int>(cls)] > 0) available.push_back(cls);
      }
      std::uniform_int_distribution<std::size_t> pick(0, available.size() - 1);
      const BrickClass cls = available[pick(layout_rng)];
      --supply[static_cast<int>(cls)];
      flat.push_back(cls);
    }
    const std::size_t bottom = (flat.size() + 1) / 2;
    pattern.emplace_back(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(bottom));
    if (bottom < flat.size()) {
      pattern.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(bottom), flat.end());
    }
  }

  RoundSetup setup{WorldState(std::move(bricks), config.assembly_area, config.ugv_start,
                              splitmix64(seed + 1)),
                   std::move(pattern)};
  return setup;
}

RoundReport run_round(const ScenarioConfig& config, int round_index,
                      const TransitionObserver& observer) {
  RoundSetup setup = build_round(config, round_index);
  WorldState& world = setup.world;
  PatternBook book = PatternBook::start(setup.pattern, config.assembly_area);

  RoundReport report;
  report.round_index = round_index;
  report.pattern = setup.pattern;

  MissionContext ctx(world, book, config.mission);
  ctx.observer = observer;
  while (ctx.state == MissionState::Search) {
    // Skip entries with no fresh brick of their class left in the piles.
    const bool available = std::any_of(world.bricks.begin(), world.bricks.end(), [&](const Brick& b) {
      return b.status == BrickStatus::InPile && b.spec.brick_class == *ctx.target_class &&
             !ctx.consumed.contains(b.index);
    });
    if (!available) {
      book.drop_entry(book.current_pattern.size());
      ctx.begin_brick();
      continue;
    }
    const BrickRecord record = run_brick(ctx);
    report.bricks.push_back(record);
    if (record[Module::Placing] == Outcome::Success && record.brick_index) {
      report.wall.push_back(world.brick(*record.brick_index).pose);
    }
  }
  return report;
}

EvalReport EvalReport::from_rounds(const std::vector<RoundReport>& rounds) {
  EvalReport report;
  for (const auto& round : rounds) {
    for (const auto& brick : round.bricks) {
      ++report.total_bricks;
      for (Module m : kModules) {
        auto& count = report.modules[static_cast<std::size_t>(m)];
        if (brick[m] != Outcome::NotAttempted) ++count.attempts;
        if (brick[m] == Outcome::Success) ++count.successes;
      }
    }
  }
  report.overall.successes = report[Module::Placing].successes;
  report.overall.attempts = report.total_bricks;
  return report;
}

std::vector<RoundReport> run_rounds(const ScenarioConfig& config, int threads) {
  std::vector<RoundReport> reports(static_cast<std::size_t>(config.rounds));
  const int workers = std::max(1, std::min(threads, config.rounds));
  if (workers == 1) {
    for (int r = 0; r < config.rounds; ++r) {
      reports[static_cast<std::size_t>(r)] = run_round(config, r + 1);
    }
    return reports;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (int r = next++; r < config.rounds; r = next++) {
          reports[static_cast<std::size_t>(r)] = run_round(config, r + 1);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return reports;
}

EvalReport run_eval(const ScenarioConfig& config) {
  return EvalReport::from_rounds(run_rounds(config, config.threads));
}

std::string format_tsv(const EvalReport& report) {
  std::ostringstream out;
  out << "module\tsuccesses\tattempts\tpercent\n";
  for (Module m : kModules) {
    const auto& c = report[m];
    out << to_string(m) << '\t' << c.successes << '\t' << c.attempts << '\t'
        << format_percent(c.percent()) << '\n';
  }
  out << "Overall\t" << report.overall.successes << '\t' << report.overall.attempts << '\t'
      << format_percent(report.overall.percent()) << '\n';
  return out.str();
}

std::string format_text(const EvalReport& report) {
  auto cell = [](int s, int a) {
    const double pct = a == 0 ? 0.0 : 100.0 * s / a;
    return std::to_string(s) + "/" + std::to_string(a) + " (" + format_percent(pct) + "%)";
  };
  const int total = report.total_bricks;
  std::ostringstream out;
  out << "Overall System Evaluation\n";
  out << "Module      Success Trials\n";
  const auto& s = report[Module::Searching];
  const auto& t = report[Module::Tracking];
  const auto& a = report[Module::Alignment];
  const auto& g = report[Module::Grasping];
  const auto& p = report[Module::Placing];
  out << "Searching   " << cell(s.successes, s.attempts) << '\n';
  out << "Tracking    " << cell(t.successes, t.attempts) << '\n';
  out << "Alignment   " << cell(a.successes, a.attempts) << '\n';
  out << "Grasping    " << cell(g.successes, g.attempts) << ", " << cell(g.successes, total) << '\n';
  out << "Placing     " << cell(p.successes, p.attempts) << ", " << cell(p.successes, total) << '\n';
  out << "Overall     " << cell(report.overall.successes, report.overall.attempts) << '\n';
  return out.str();
}

EvalReport parse_tsv_report(std::string_view text) {
  EvalReport report;
  bool seen_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line =
        trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split_ws(line);
    if (!seen_header) {
      seen_header = true;
      if (!cols.empty() && cols[0] == "module") continue;
    }
    if (cols.size() < 3) {
      throw MalformedValue("report row '" + std::string(line) + "' needs module, successes, attempts");
    }
    ModuleCount count{parse_int<int>("successes", cols[1]), parse_int<int>("attempts", cols[2])};
    if (cols[0] == "Overall") {
      report.overall = count;
      report.total_bricks = count.attempts;
      continue;
    }
    bool matched = false;
    for (Module m : kModules) {
      if (cols[0] == to_string(m)) {
        report.modules[static_cast<std::size_t>(m)] = count;
        matched = true;
      }
    }
    if (!matched) {
      throw MalformedValue("unknown module '" + std::string(cols[0]) + "'");
    }
  }
  if (report[Module::Alignment].attempts == 0 || report[Module::Placing].attempts == 0) {
    throw MalformedValue("target table needs Alignment and Placing attempts");
  }
  return report;
}

namespace {

double failure_rate(const ModuleCount& c) {
  return c.attempts == 0 ? 0.0 : 1.0 - static_cast<double>(c.successes) / c.attempts;
}

// Smallest-error probability found by log-space bisection of a rate that
// grows with p.
double bisect_log(const std::function<double(double)>& rate, double target, int iterations,
                  double& achieved) {
  double lo = 1e-6;
  double hi = 1.0;
  double best_p = lo;
  double best_err = std::numeric_limits<double>::infinity();
  for (int i = 0; i < iterations; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double r = rate(mid);
    if (std::abs(r - target) < best_err) {
      best_err = std::abs(r - target);
      best_p = mid;
      achieved = r;
    }
    if (r < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best_p;
}

}  // namespace

CalibrationResult calibrate(const ScenarioConfig& config, const EvalReport& target, int rounds,
                            int iterations) {
  CalibrationResult result;
  result.target_align_failure = failure_rate(target[Module::Alignment]);
  result.target_place_failure = failure_rate(target[Module::Placing]);

  ScenarioConfig trial = config;
  trial.rounds = rounds;
  trial.mission.place_localization.freeze_probability_per_meter = 0.0;
  result.align_freeze_per_meter = bisect_log(
      [&](double p) {
        trial.mission.align_localization.freeze_probability_per_meter = p;
        return failure_rate(run_eval(trial)[Module::Alignment]);
      },
      result.target_align_failure, iterations, result.achieved_align_failure);

  trial.mission.align_localization.freeze_probability_per_meter = result.align_freeze_per_meter;
  result.place_freeze_per_meter = bisect_log(
      [&](double p) {
        trial.mission.place_localization.freeze_probability_per_meter = p;
        return failure_rate(run_eval(trial)[Module::Placing]);
      },
      result.target_place_failure, iterations, result.achieved_place_failure);
  return result;
}

}  // namespace brickbot
