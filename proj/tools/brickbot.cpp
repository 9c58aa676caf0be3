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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "brickbot/error.hpp"
#include "brickbot/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw brickbot::IoError("cannot read " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw brickbot::IoError("cannot write " + path);
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const brickbot::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const brickbot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brick-stacking mission simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string report_path;
  std::string format = "text";
  int rounds = 0;
  long long seed = -1;
  int threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Run evaluation rounds and report module success rates");
  simulate->add_option("--config", config_path, "Scenario config file")->required();
  simulate->add_option("--rounds", rounds, "Override the number of rounds")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);
  simulate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--report", report_path, "Write the report here instead of stdout");
  simulate->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "tsv"}));

  std::string target_path;
  auto* calibrate = app.add_subcommand("calibrate", "Fit freeze probabilities to a target table");
  calibrate->add_option("--config", config_path, "Scenario config file")->required();
  calibrate->add_option("--target-table", target_path, "TSV module table to match")->required();
  calibrate->add_option("--rounds", rounds, "Rounds per evaluation")->check(CLI::PositiveNumber);
  calibrate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string pattern_path;
  auto* validate = app.add_subcommand("validate-pattern", "Check a wall pattern file");
  validate->add_option("path", pattern_path, "Pattern file")->required();

  app.add_subcommand("print-config", "Print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (*simulate) {
    return guarded([&] {
      auto config = brickbot::load_config(config_path);
      if (rounds > 0) config.rounds = rounds;
      if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
      if (threads > 0) config.threads = threads;
      const auto report = brickbot::run_eval(config);
      write_text(report_path, format == "tsv" ? brickbot::format_tsv(report) : brickbot::format_text(report));
    });
  }
  if (*calibrate) {
    return guarded([&] {
      auto config = brickbot::load_config(config_path);
      if (threads > 0) config.threads = threads;
      const auto target = brickbot::parse_tsv_report(read_text(target_path));
      const auto result = brickbot::calibrate(config, target, rounds > 0 ? rounds : 200);
      std::printf("localization.freeze_per_meter.align = %.6g\n", result.align_freeze_per_meter);
      std::printf("localization.freeze_per_meter.place = %.6g\n", result.place_freeze_per_meter);
      std::printf("# alignment failure: target %.4f achieved %.4f\n", result.target_align_failure,
                  result.achieved_align_failure);
      std::printf("# placing failure: target %.4f achieved %.4f\n", result.target_place_failure,
                  result.achieved_place_failure);
    });
  }
  if (*validate) {
    return guarded([&] {
      const auto pattern = brickbot::parse_pattern_file(read_text(pattern_path));
      std::printf("ok: %zu layers, %zu bricks\n", pattern.size(), brickbot::brick_count(pattern));
    });
  }
  std::cout << brickbot::default_config_text();
  return kExitOk;
}
