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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "brickbot/error.hpp"
#include "brickbot/harness.hpp"

using namespace brickbot;

namespace {

ScenarioConfig noiseless(int rounds) {
  ScenarioConfig c;
  c.rounds = rounds;
  c.mission.perception_sigma = 0.0;
  c.mission.align_localization = LocalizationModel{};
  c.mission.place_localization = LocalizationModel{};
  c.mission.quiet_localization = LocalizationModel{};
  return c;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const ScenarioConfig c = parse_config("seed = 42\nrounds = 50\n");
  const ScenarioConfig d;
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.rounds, 50);
  EXPECT_EQ(c.piles.size(), d.piles.size());
  EXPECT_EQ(c.mission.align_localization.freeze_probability_per_meter,
            d.mission.align_localization.freeze_probability_per_meter);

  const ScenarioConfig e = parse_config(
      "# comment\nrounds = 3   # trailing\ngripper.force_threshold = 40\ncamera.fov_deg = 90\n"
      "pattern = R G / B\nlocalization.freeze_per_meter = 0.25\n");
  EXPECT_EQ(e.rounds, 3);
  EXPECT_EQ(e.mission.gripper.force_threshold, 40.0);
  EXPECT_NEAR(e.mission.camera.horizontal_fov, std::numbers::pi / 2, 1e-15);
  ASSERT_TRUE(e.pattern.has_value());
  EXPECT_EQ(*e.pattern, (TargetPattern{{BrickClass::R, BrickClass::G}, {BrickClass::B}}));
  EXPECT_EQ(e.mission.align_localization.freeze_probability_per_meter, 0.25);
  EXPECT_EQ(e.mission.place_localization.freeze_probability_per_meter, 0.25);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("rounds = 0"), MalformedValue);
  EXPECT_THROW(parse_config("rounds = many"), MalformedValue);
  EXPECT_THROW(parse_config("dt = -0.1"), MalformedValue);
  EXPECT_THROW(parse_config("rounds"), MalformedValue);
  EXPECT_THROW(parse_config("colour = red"), UnknownKey);
  EXPECT_THROW(parse_config("pile = X 3 1 1 0"), MalformedValue);
  EXPECT_THROW(parse_config("pattern = B B B\npile = B 2 10 0 0\npile = R 5 -10 0 0"),
               UnsatisfiablePile);
  EXPECT_THROW(parse_config("pattern_path = does/not/exist.txt"), IoError);
  EXPECT_THROW(load_config("/nonexistent/brickbot.conf"), IoError);
}

TEST(Config, PatternPathRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "brickbot_cfg_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "wall.txt") << "R R\nG\n";
  std::ofstream(dir / "run.conf") << "pattern_path = wall.txt\nrounds = 2\n";
  const ScenarioConfig c = load_config(dir / "run.conf");
  ASSERT_TRUE(c.pattern.has_value());
  EXPECT_EQ(brick_count(*c.pattern), 3u);
  std::filesystem::remove_all(dir);
}

TEST(Config, DefaultTextRoundTrips) {
  const ScenarioConfig a;
  const ScenarioConfig b = parse_config(default_config_text());
  EXPECT_EQ(b.piles.size(), a.piles.size());
  EXPECT_EQ(b.mission.tracking.k_lat, a.mission.tracking.k_lat);
  EXPECT_EQ(b.mission.place_localization.freeze_probability_per_meter,
            a.mission.place_localization.freeze_probability_per_meter);
  EXPECT_NEAR(b.mission.gripper.tilt_tolerance, a.mission.gripper.tilt_tolerance, 1e-15);
  EXPECT_NEAR(b.piles[1].yaw, a.piles[1].yaw, 1e-15);
}

TEST(BuildRound, PilesAndPattern) {
  const ScenarioConfig c;
  for (int r = 1; r <= 30; ++r) {
    const RoundSetup s = build_round(c, r);
    EXPECT_EQ(s.world.bricks.size(), 24u);
    const std::size_t n = brick_count(s.pattern);
    EXPECT_GE(n, 6u);
    EXPECT_LE(n, 8u);
    EXPECT_EQ(s.pattern[0].size(), (n + 1) / 2);
    for (const auto& b : s.world.bricks) {
      const double d = std::hypot(b.pose.centroid.x(), b.pose.centroid.y());
      EXPECT_GT(d, 5.0);
      EXPECT_LT(d, 25.0);
    }
  }
}

TEST(RunRound, NoiselessSixBricks) {
  ScenarioConfig c = noiseless(1);
  c.pattern = TargetPattern{{BrickClass::R, BrickClass::G, BrickClass::B},
                            {BrickClass::G, BrickClass::R, BrickClass::R}};
  const RoundReport r = run_round(c, 1);
  ASSERT_EQ(r.bricks.size(), 6u);
  for (const auto& b : r.bricks)
    for (Module m : kModules) EXPECT_EQ(b[m], Outcome::Success);
  ASSERT_EQ(r.wall.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    ASSERT_TRUE(r.bricks[i].place_pose.has_value());
    EXPECT_LT((r.wall[i].centroid - r.bricks[i].place_pose->centroid).norm(), 1e-3);
  }
  // Second layer sits one brick height above the first, at the assembly origin.
  EXPECT_NEAR(r.wall[3].centroid.z() - r.wall[0].centroid.z(), 0.2, 1e-3);
  EXPECT_NEAR((r.wall[3].centroid - r.wall[0].centroid).head<2>().norm(), 0.0, 1e-3);
}

TEST(RunRound, Deterministic) {
  const ScenarioConfig c;
  const RoundReport a = run_round(c, 4);
  const RoundReport b = run_round(c, 4);
  ASSERT_EQ(a.bricks.size(), b.bricks.size());
  for (std::size_t i = 0; i < a.bricks.size(); ++i) {
    EXPECT_EQ(a.bricks[i].outcomes, b.bricks[i].outcomes);
    EXPECT_EQ(a.bricks[i].brick_index, b.bricks[i].brick_index);
    EXPECT_EQ(a.bricks[i].place_position_error, b.bricks[i].place_position_error);
  }
  ASSERT_EQ(a.wall.size(), b.wall.size());
  for (std::size_t i = 0; i < a.wall.size(); ++i) EXPECT_EQ(a.wall[i].centroid, b.wall[i].centroid);
}

TEST(RunRound, CertainFreezesBreakAlignment) {
  ScenarioConfig c = noiseless(1);
  c.mission.align_localization.freeze_probability_per_meter = 1.0;
  const RoundReport r = run_round(c, 1);
  ASSERT_FALSE(r.bricks.empty());
  int align_failures = 0;
  for (const auto& b : r.bricks) align_failures += b[Module::Alignment] == Outcome::Failure;
  EXPECT_GT(align_failures, static_cast<int>(r.bricks.size()) / 2);
}

TEST(RunRound, SkipsEntriesWithoutSupply) {
  ScenarioConfig c = noiseless(1);
  c.mission.align_localization.freeze_probability_per_meter = 1.0;
  c.piles = {{BrickClass::R, 2, 12, 0, 0}};
  c.pattern = TargetPattern{{BrickClass::R, BrickClass::R, BrickClass::R}};
  EXPECT_THROW(c.validate(), UnsatisfiablePile);
  c.pattern = TargetPattern{{BrickClass::R, BrickClass::R}};
  const RoundReport r = run_round(c, 1);
  EXPECT_LE(r.bricks.size(), 2u);
}

TEST(EvalReport, NoiselessAllModules) {
  ScenarioConfig c = noiseless(5);
  c.pattern = TargetPattern{{BrickClass::R, BrickClass::G, BrickClass::B},
                            {BrickClass::B, BrickClass::R, BrickClass::G}};
  const EvalReport e = run_eval(c);
  for (Module m : kModules) {
    EXPECT_EQ(e[m].successes, 30);
    EXPECT_EQ(e[m].attempts, 30);
  }
  EXPECT_EQ(e.overall.successes, 30);
}

TEST(EvalReport, ForcedGraspFailureHasNoPlacingAttempts) {
  ScenarioConfig c = noiseless(1);
  c.pattern = TargetPattern{{BrickClass::R}};
  c.mission.gripper.k_foam = 100.0;
  const EvalReport e = run_eval(c);
  EXPECT_EQ(e[Module::Grasping].attempts, 1);
  EXPECT_EQ(e[Module::Grasping].successes, 0);
  EXPECT_EQ(e[Module::Placing].attempts, 0);
  EXPECT_EQ(e[Module::Placing].successes, 0);
  EXPECT_NE(format_tsv(e).find("Placing\t0\t0\t0.0\n"), std::string::npos);
}

TEST(EvalReport, CountsConserve) {
  ScenarioConfig c;
  c.rounds = 10;
  const auto rounds = run_rounds(c, 1);
  const EvalReport e = EvalReport::from_rounds(rounds);
  int total = 0;
  for (const auto& r : rounds) total += static_cast<int>(r.bricks.size());
  EXPECT_EQ(e.total_bricks, total);
  EXPECT_EQ(e[Module::Grasping].attempts, e[Module::Alignment].successes);
  EXPECT_EQ(e[Module::Placing].attempts, e[Module::Grasping].successes);
  for (Module m : kModules) {
    int s = 0, f = 0, n = 0;
    for (const auto& r : rounds)
      for (const auto& b : r.bricks) {
        s += b[m] == Outcome::Success;
        f += b[m] == Outcome::Failure;
        n += b[m] == Outcome::NotAttempted;
      }
    EXPECT_EQ(s + f + n, total);
    EXPECT_EQ(e[m].successes, s);
    EXPECT_EQ(e[m].attempts, s + f);
  }
}

TEST(Report, TsvRoundTrip) {
  ScenarioConfig c;
  c.rounds = 6;
  const EvalReport e = run_eval(c);
  const std::string tsv = format_tsv(e);
  EXPECT_EQ(tsv.rfind("module\tsuccesses\tattempts\tpercent\n", 0), 0u);
  const EvalReport back = parse_tsv_report(tsv);
  for (Module m : kModules) {
    EXPECT_EQ(back[m].successes, e[m].successes);
    EXPECT_EQ(back[m].attempts, e[m].attempts);
  }
  EXPECT_EQ(format_tsv(back), tsv);
  const std::string text = format_text(e);
  EXPECT_NE(text.find("Grasping"), std::string::npos);
}

TEST(Report, PercentFormatting) {
  EvalReport e;
  e.modules[static_cast<std::size_t>(Module::Placing)] = {218, 292};
  e.modules[static_cast<std::size_t>(Module::Alignment)] = {292, 346};
  e.overall = {218, 346};
  const std::string tsv = format_tsv(e);
  EXPECT_NE(tsv.find("Alignment\t292\t346\t84.4\n"), std::string::npos);
  EXPECT_NE(tsv.find("Overall\t218\t346\t63.0\n"), std::string::npos);
  EXPECT_NE(tsv.find("Searching\t0\t0\t0.0\n"), std::string::npos);
}

TEST(Report, ParseErrors) {
  EXPECT_THROW(parse_tsv_report("module\tsuccesses\tattempts\tpercent\nBogus\t1\t2\t50.0\n"),
               MalformedValue);
  EXPECT_THROW(parse_tsv_report("Alignment\t1\n"), MalformedValue);
}

TEST(RunRounds, ParallelMatchesSerial) {
  ScenarioConfig c;
  c.rounds = 8;
  EXPECT_EQ(format_tsv(EvalReport::from_rounds(run_rounds(c, 1))),
            format_tsv(EvalReport::from_rounds(run_rounds(c, 4))));
}

TEST(RoundSeed, DistinctPerRound) {
  EXPECT_NE(round_seed(42, 1), round_seed(42, 2));
  EXPECT_NE(round_seed(42, 1), round_seed(43, 1));
  EXPECT_EQ(round_seed(42, 7), round_seed(42, 7));
}

TEST(Calibrate, MovesTowardTargets) {
  ScenarioConfig c;
  EvalReport target;
  target.modules[static_cast<std::size_t>(Module::Alignment)] = {70, 100};
  target.modules[static_cast<std::size_t>(Module::Placing)] = {35, 70};
  const CalibrationResult r = calibrate(c, target, 10, 8);
  EXPECT_NEAR(r.target_align_failure, 0.3, 1e-12);
  EXPECT_NEAR(r.target_place_failure, 0.5, 1e-12);
  EXPECT_GT(r.align_freeze_per_meter, 0.0);
  EXPECT_LE(r.align_freeze_per_meter, 1.0);
  EXPECT_GT(r.place_freeze_per_meter, 0.0);
  EXPECT_LT(std::abs(r.achieved_align_failure - 0.3), 0.15);
  EXPECT_LT(std::abs(r.achieved_place_failure - 0.5), 0.15);
}
