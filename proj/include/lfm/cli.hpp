// Copyright 2026 The LFM Auction Authors
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


#ifndef LFM_CLI_HPP_
#define LFM_CLI_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace lfm {

// Entry point of the lfm tool. Returns the process exit code: 0 on
// success, 1 on a runtime failure, 2 on a usage or configuration error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args[0] is the program

// Files under a run directory that must be byte-identical across two runs
// with the same seed: instances, labels and model checkpoints. Sorted,
// relative to the run directory.
std::vector<std::filesystem::path> deterministic_outputs(
    const std::filesystem::path& run_dir);

}  // namespace lfm

#endif  // LFM_CLI_HPP_
