// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The lmaug Authors.
//
// Exception types shared by all lmaug modules.

#ifndef LMAUG_ERROR_H_
#define LMAUG_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lmaug {

// Base of every error the library throws on bad input data or bad arguments.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid UTF-8 in a text stream.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::uint64_t byte_offset)
      : Error(what + " at byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}
  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

// Malformed file (ARPA, model, config, n-best...). line() is 1-based, 0 if
// the problem is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_;
};

// A pipeline stage failed; what() is prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace lmaug

#endif  // LMAUG_ERROR_H_
