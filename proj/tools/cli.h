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

#ifndef LMAUG_TOOLS_CLI_H_
#define LMAUG_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace lmaug::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one `lmaug` invocation.  args excludes the program name.  Results
// go to `out`, usage text and one-line diagnostics to `err`; progress is
// logged to stderr.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmaug::cli

#endif  // LMAUG_TOOLS_CLI_H_
