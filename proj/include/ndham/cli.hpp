/*
 * Copyright 2026 The ndham Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NDHAM_CLI_HPP
#define NDHAM_CLI_HPP

#include <ostream>
#include <span>
#include <string>

namespace ndham::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kVerdictFalse = 1,
  kUsage = 2,
  kNumerical = 3,
};

/// Runs one subcommand. `args` excludes the program name. Reports go to the
/// --output path (default: `out`); diagnostics go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ndham::cli

#endif  // NDHAM_CLI_HPP
