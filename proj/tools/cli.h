//
// Copyright 2026 The BinCP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef BINCP_TOOLS_CLI_H_
#define BINCP_TOOLS_CLI_H_

#include <ostream>

namespace bincp::cli {

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Entry point of the `bincp` tool. Subcommands: calibrate, predict, certify,
// simulate, evaluate, compare-intervals. Diagnostics go to `err` as a single
// line.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace bincp::cli

#endif  // BINCP_TOOLS_CLI_H_
