/*
 * Copyright 2026 The Hearthcast Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end.
//
//   hearthcast gen        [--config F] [--n N] [--seed S] [--out F]
//   hearthcast train      --data F --kind K [--config F] [--seed S] --out F
//   hearthcast predict    --model F --input F [--format json|csv|text]
//   hearthcast explain    --model F --input F [--format json|text]
//   hearthcast benchmark  [--config F] [--seed S] [--n N] --out DIR
//                         [--format json|csv|all]
//   hearthcast serve      --model F [--host H] [--port P]
//
// Exit status: 0 success, 1 usage error, 2 data, config, model or I/O error.

#ifndef HEARTHCAST_CLI_HPP_
#define HEARTHCAST_CLI_HPP_

#include <ostream>

namespace hearthcast {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace hearthcast

#endif  // HEARTHCAST_CLI_HPP_
