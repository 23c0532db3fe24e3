/* Copyright 2026 The segkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SEGKIT_CLI_DISPATCH_HPP_
#define SEGKIT_CLI_DISPATCH_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace segkit::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitInternal = 3;

// Runs one subcommand:
//   stats       --gt A [--out J] [--csv C]     report on stdout
//   correct     --gt A --out A'
//   refine      --pred COARSE --features F --model M --out P
//   tta-fuse    --pred P1 --pred P2 ... [--gt A] --out P
//   ensemble    --pred P1 --pred P2 ... --out P
//   eval        --gt A --pred P [--out J]        table on stdout
//   train-demo  --out DIR
// All accept --config, --seed and --threads; the flags override the config.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segkit::cli

#endif  // SEGKIT_CLI_DISPATCH_HPP_
