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
#include <stdexcept>
#include <string>

namespace brickbot {

/// Base of every error raised by the library. Mission-level failures are
/// reported as data in the round ledger; these exceptions are contract
/// violations or module-level failure signals.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BRICKBOT_DEFINE_ERROR(Name)          \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

// geometry
BRICKBOT_DEFINE_ERROR(InsufficientPoints);
BRICKBOT_DEFINE_ERROR(DegenerateCloud);

// control
BRICKBOT_DEFINE_ERROR(ProgressOutOfRange);
BRICKBOT_DEFINE_ERROR(FeedbackStalled);

// perception
BRICKBOT_DEFINE_ERROR(UnknownBrick);
BRICKBOT_DEFINE_ERROR(NotVisible);

// planner
BRICKBOT_DEFINE_ERROR(TiltedBrick);
BRICKBOT_DEFINE_ERROR(PatternExhausted);

// world
BRICKBOT_DEFINE_ERROR(OutOfReach);
BRICKBOT_DEFINE_ERROR(MaxDepthExceeded);
BRICKBOT_DEFINE_ERROR(NoContact);
BRICKBOT_DEFINE_ERROR(NotCarried);

// mission
BRICKBOT_DEFINE_ERROR(SearchExhausted);

// harness
BRICKBOT_DEFINE_ERROR(EmptyPattern);
BRICKBOT_DEFINE_ERROR(UnknownKey);
BRICKBOT_DEFINE_ERROR(MalformedValue);
BRICKBOT_DEFINE_ERROR(UnsatisfiablePile);
BRICKBOT_DEFINE_ERROR(IoError);

#undef BRICKBOT_DEFINE_ERROR

/// A pattern token outside the catalog. Line and column are 1-based.
class InvalidToken : public Error {
 public:
  InvalidToken(std::size_t line, std::size_t column, std::string token)
      : Error("InvalidToken: '" + token + "' at line " + std::to_string(line) +
              ", column " + std::to_string(column)),
        line_(line),
        column_(column),
        token_(std::move(token)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

}  // namespace brickbot
