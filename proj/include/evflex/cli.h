// Copyright 2026 The evflex Authors
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

#ifndef EVFLEX_CLI_H_
#define EVFLEX_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace evflex {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailedChecks = 1,
  kExitIo = 2,
  kExitInfeasible = 3,
  kExitMembership = 4,
  kExitConvergence = 5,
};

// Runs one command line (without the program name) and returns the exit
// code. Normal output goes to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Routes library logging to stderr at the level named by EVFLEX_LOG_LEVEL
// (trace, debug, info, warn, error, critical, off; default warn).
void ConfigureLogging();

}  // namespace evflex

#endif  // EVFLEX_CLI_H_
