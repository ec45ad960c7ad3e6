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

#ifndef FPA_EXEC_ORACLE_H_
#define FPA_EXEC_ORACLE_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "fpa/code_unit.h"

namespace fpa {

enum class ExecStatus { kOk, kCompileError, kRuntimeError, kTimeout };

std::string_view ExecStatusName(ExecStatus status);

struct ExecResult {
  ExecStatus status = ExecStatus::kOk;
  std::string stdout_normalized;
  std::string stderr_text;
  std::chrono::milliseconds duration{0};
  int exit_code = 0;
  bool output_truncated = false;

  bool ok() const { return status == ExecStatus::kOk; }
  // One-line description for diagnostics.
  std::string Describe() const;
};

// Network is always denied and writes are confined to the per-run temp
// directory; neither is configurable.
struct ExecLimits {
  std::chrono::milliseconds wall_timeout{10000};
  std::chrono::milliseconds compile_timeout{120000};
  std::size_t max_output = 1 << 20;
};

// Per-language executable overrides. Empty entries are discovered on PATH.
struct ToolchainOverrides {
  std::map<Language, std::filesystem::path> paths;
};

struct OracleOptions {
  ToolchainOverrides toolchains;
  // Root for per-run temp directories and the compiled-binary cache.
  std::filesystem::path scratch_root;
  // Shared Go build cache (compile step only).
  std::filesystem::path go_cache;
  int max_parallel = 0;  // 0: hardware concurrency
};

// exec(.) of the attack definitions: runs code units in isolated
// subprocesses and reports normalized observable behavior.
class ExecOracle {
 public:
  explicit ExecOracle(OracleOptions options = {});
  ~ExecOracle();
  ExecOracle(const ExecOracle&) = delete;
  ExecOracle& operator=(const ExecOracle&) = delete;

  // Throws EnvironmentError naming the language if its toolchain is absent.
  ExecResult Execute(const CodeUnit& unit, const ExecLimits& limits = {}) const;
  // Runs a complete program text (for example an LLM rewrite).
  ExecResult ExecuteProgram(Language language, std::string_view program,
                            const ExecLimits& limits = {}) const;
  // Execute() with results remembered per (program, limits). Only for
  // callers that already know the unit is deterministic.
  ExecResult ExecuteMemoized(const CodeUnit& unit,
                             const ExecLimits& limits = {}) const;
  ExecResult ExecuteProgramMemoized(Language language, std::string_view program,
                                    const ExecLimits& limits = {}) const;

  // Parses/compiles without running. ok() on success, kCompileError with the
  // diagnostics otherwise.
  ExecResult CheckSyntax(Language language, std::string_view program,
                         const ExecLimits& limits = {}) const;

  // Two fresh executions; true iff both are ok and equivalent. Execution
  // failures propagate as a ValidationError carrying the diagnostics.
  bool CheckDeterministic(const CodeUnit& unit, const ExecLimits& limits = {}) const;

  bool HasToolchain(Language language) const;
  // Executable used for `language`; throws EnvironmentError if missing.
  std::filesystem::path ToolchainPath(Language language) const;
  // First line of `<tool> --version`, or "unavailable".
  std::string ToolchainVersion(Language language) const;

  // Number of processes actually launched for program runs (not compiles).
  long RunCount() const { return run_count_.load(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  mutable std::atomic<long> run_count_{0};
};

// Definition-2 equality on observable behavior: normalized stdout and exit
// code. Throws NotComparableError unless both results are ok.
bool Equivalent(const ExecResult& a, const ExecResult& b);

}  // namespace fpa

#endif  // FPA_EXEC_ORACLE_H_
