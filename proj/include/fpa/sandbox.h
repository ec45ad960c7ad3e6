// Copyright 2026 The FPA Toolkit Authors
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

#ifndef FPA_SANDBOX_H_
#define FPA_SANDBOX_H_

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace fpa {

struct ProcessSpec {
  std::vector<std::string> argv;
  std::filesystem::path working_dir;
  // Full environment of the child, "KEY=value".
  std::vector<std::string> env;
  // Paths (directories or files) the child may write beneath. Everything
  // else is read-only when Landlock is available.
  std::vector<std::filesystem::path> writable;
  std::chrono::milliseconds timeout{10000};
  std::size_t max_output = 1 << 20;
  bool deny_network = true;
};

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool truncated = false;
  std::string stdout_text;
  std::string stderr_text;
  std::chrono::milliseconds duration{0};
};

struct SandboxCapabilities {
  bool network_namespace = false;
  int landlock_abi = 0;  // 0 when unavailable
};

// Probes (once) what isolation the kernel offers to this process.
const SandboxCapabilities& ProbeSandbox();

// Runs one process in its own process group with the requested isolation.
// The whole group is killed on timeout. Throws EnvironmentError if network
// denial was requested but cannot be established, or if exec fails.
ProcessResult RunProcess(const ProcessSpec& spec);

}  // namespace fpa

#endif  // FPA_SANDBOX_H_
