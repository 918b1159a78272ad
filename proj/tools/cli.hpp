// Copyright 2026 The memsel Authors.
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

#ifndef MEMSEL_TOOLS_CLI_HPP_
#define MEMSEL_TOOLS_CLI_HPP_

namespace memsel::cli {

// Exit codes: 0 success, 1 oracle audit failure or internal error,
// 2 invalid arguments / malformed input, 3 empty input.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAuditFailure = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitEmptyInput = 3;

int run(int argc, char** argv);

}  // namespace memsel::cli

#endif  // MEMSEL_TOOLS_CLI_HPP_
