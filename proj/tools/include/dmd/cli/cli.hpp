// Copyright 2026 The dmd Authors. All Rights Reserved.
//
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

#ifndef DMD_CLI_CLI_HPP_
#define DMD_CLI_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace dmd::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation or property failure
inline constexpr int kExitUsage = 2;    // bad arguments or I/O error

// Runs the tool on `args` (without the program name), writing reports to
// `out` and diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int run(int argc, char** argv);

}  // namespace dmd::cli

#endif  // DMD_CLI_CLI_HPP_
