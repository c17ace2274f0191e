// Copyright 2026 The Wardrobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WARDROBE_CLI_H_
#define WARDROBE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace wardrobe {

inline constexpr char kVersion[] = "0.1.0";

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitBudget = 4;

// Runs one command line (without the program name). Results go to files;
// `out` receives help text and short summaries, `err` a JSON error record
// on failure.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace wardrobe

#endif  // WARDROBE_CLI_H_
