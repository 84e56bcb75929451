/* Copyright 2026 The rinkreg Authors. All Rights Reserved.

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

#ifndef RINKREG_TOOLS_CLI_HPP_
#define RINKREG_TOOLS_CLI_HPP_

#include <string>
#include <string_view>

namespace rinkreg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags, bad config, invalid parameter values
  kExitData = 2,      // unreadable or malformed inputs, missing predictions
  kExitInternal = 3,  // anything else
};

// Entry point of the `rinkreg` tool. Subcommands: rinkgen, synth, register,
// eval, camera-pool, calibrate-scales.
int Run(int argc, const char* const* argv);

// Resolved register config with run-location keys (paths, worker count)
// removed; eval hashes this text into the report's config_hash.
std::string HashableRegisterConfig(std::string_view resolved_toml);

}  // namespace rinkreg::cli

#endif  // RINKREG_TOOLS_CLI_HPP_
