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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brickbot/mission.hpp"
#include "brickbot/pattern.hpp"

namespace brickbot {

/// Line-based wall layout: one layer per line, bottom first, tokens R/G/B/O
/// separated by whitespace, `#` to end of line is a comment.
/// Throws EmptyPattern or InvalidToken (1-based line and column).
TargetPattern parse_pattern_file(std::string_view text);

/// One pile: a grid of same-class bricks laid end to end along their major
/// axis, several rows deep.
struct PileSpec {
  BrickClass brick_class = BrickClass::R;
  int count = 0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 42;
  int rounds = 50;
  int threads = 1;

  /// Fixed wall for every round; when absent each round draws a pattern of
  /// uniform length in [pattern_min_length, pattern_max_length].
  std::optional<TargetPattern> pattern;
  std::string pattern_path;
  int pattern_min_length = 6;
  int pattern_max_length = 8;

  MissionConfig mission;

  std::vector<PileSpec> piles;
  double pile_position_jitter = 2.0;  // m, uniform per axis
  double pile_yaw_jitter = 0.5;       // rad, uniform
  int pile_columns = 3;
  double pile_row_spacing = 2.0;  // m between rows
  double pile_gap = 0.8;          // m between brick ends in a row
  double pile_tilt = 0.0;         // rad, brick top-face tilt

  Pose6D assembly_area = Pose6D::from_yaw(Vec3(0.0, 0.0, 0.1), 0.0);
  Pose2D ugv_start{0.0, -2.0, 0.0};

  ScenarioConfig();

  /// Checks ranges and that the piles can satisfy the pattern demand.
  void validate() const;
};

/// Flat `key = value` text. Unknown keys throw UnknownKey, bad values
/// MalformedValue, unsatisfiable demand UnsatisfiablePile. A `pattern_path`
/// is resolved against `base_dir`; failing to read it throws IoError.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file. Throws IoError when unreadable.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Documented keys with their default values, one `key = value` per line.
std::string default_config_text();

struct RoundReport {
  int round_index = 0;
  TargetPattern pattern;
  std::vector<BrickRecord> bricks;
  /// Final poses of bricks released on the wall, in placement order.
  std::vector<Pose6D> wall;
};

/// Seed for round `round_index` derived from the scenario seed.
std::uint64_t round_seed(std::uint64_t seed, int round_index);

/// Builds the world for a round (pile layout and pattern), used by run_round.
struct RoundSetup {
  WorldState world;
  TargetPattern pattern;
};
RoundSetup build_round(const ScenarioConfig& config, int round_index);

/// Observer hook for tests; called after every mission transition.
RoundReport run_round(const ScenarioConfig& config, int round_index,
                      const TransitionObserver& observer = {});

struct ModuleCount {
  int successes = 0;
  int attempts = 0;
  double percent() const { return attempts == 0 ? 0.0 : 100.0 * successes / attempts; }
};

struct EvalReport {
  std::array<ModuleCount, kModuleCount> modules{};
  ModuleCount overall;
  int total_bricks = 0;

  const ModuleCount& operator[](Module m) const { return modules[static_cast<std::size_t>(m)]; }

  static EvalReport from_rounds(const std::vector<RoundReport>& rounds);
};

/// Runs rounds 1..N on `threads` workers; results are merged in round order.
std::vector<RoundReport> run_rounds(const ScenarioConfig& config, int threads);
EvalReport run_eval(const ScenarioConfig& config);

/// `module<TAB>successes<TAB>attempts<TAB>percent` with one decimal.
std::string format_tsv(const EvalReport& report);
/// Human-readable table with conditional and absolute rates.
std::string format_text(const EvalReport& report);

/// Parses a TSV report (as written by format_tsv) back into counts.
EvalReport parse_tsv_report(std::string_view text);

struct CalibrationResult {
  double align_freeze_per_meter = 0.0;
  double place_freeze_per_meter = 0.0;
  double target_align_failure = 0.0;
  double target_place_failure = 0.0;
  double achieved_align_failure = 0.0;
  double achieved_place_failure = 0.0;
};

/// Fits the per-meter freeze probabilities by bisection (in log space) so the
/// simulated alignment failure rate and the placing failure rate given a
/// grasp match the target table.
CalibrationResult calibrate(const ScenarioConfig& config, const EvalReport& target,
                            int rounds = 200, int iterations = 18);

}  // namespace brickbot
