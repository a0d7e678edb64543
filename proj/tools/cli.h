// Copyright 2026 The lsscore Authors.
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

#ifndef LSSCORE_TOOLS_CLI_H_
#define LSSCORE_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace lsscore::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kDivergence = 3,
};

// Runs one subcommand. `args` excludes the program name. Results go to
// `out`, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsscore::cli

#endif  // LSSCORE_TOOLS_CLI_H_
