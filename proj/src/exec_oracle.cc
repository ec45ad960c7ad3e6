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

#include "fpa/exec_oracle.h"

#include <unistd.h>

#include <cstdlib>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>
#include <variant>

#include "fpa/errors.h"
#include "fpa/sandbox.h"
#include "fpa/text_util.h"

namespace fpa {
namespace {

namespace fs = std::filesystem;

// Exit status reserved by the Python bootstrap for syntax errors.
constexpr int kPythonSyntaxExit = 213;

constexpr std::string_view kPythonBootstrap = R"(import sys
path = sys.argv[1]
with open(path, encoding="utf-8") as fh:
    src = fh.read()
try:
    code = compile(src, path, "exec")
except SyntaxError:
    import traceback
    traceback.print_exc()
    sys.exit(213)
if len(sys.argv) > 2 and sys.argv[2] == "--check":
    sys.exit(0)
sys.argv = sys.argv[1:]
exec(code, {"__name__": "__main__", "__file__": path, "__builtins__": __builtins__})
)";

std::string ProgramFileName(Language language) {
  return "main." + std::string(SourceExtension(language));
}

bool IsCompiled(Language language) {
  return language == Language::kC || language == Language::kRust ||
         language == Language::kGo;
}

std::optional<fs::path> FindOnPath(std::string_view name) {
  const char* path_env = std::getenv("PATH");
  if (!path_env) return std::nullopt;
  std::stringstream ss(path_env);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    fs::path candidate = fs::path(dir) / name;
    if (access(candidate.c_str(), X_OK) == 0 && !fs::is_directory(candidate)) {
      return candidate;
    }
  }
  return std::nullopt;
}

std::vector<std::string> DefaultToolNames(Language language) {
  switch (language) {
    case Language::kPython:
      return {"python3", "python"};
    case Language::kC:
      return {"cc", "gcc", "clang"};
    case Language::kRust:
      return {"rustc"};
    case Language::kGo:
      return {"go"};
    case Language::kJavaScript:
      return {"node", "nodejs"};
    case Language::kHtml:
      return {};
  }
  return {};
}

std::string FirstLine(std::string_view text) {
  auto lines = SplitLines(text);
  return lines.empty() ? std::string() : std::string(Trim(lines.front()));
}

// Unique directory under `root`.
fs::path MakeTempDir(const fs::path& root) {
  fs::create_directories(root);
  std::string tmpl = (root / "run-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) {
    throw EnvironmentError("cannot create temp dir under " + root.string());
  }
  return fs::path(tmpl);
}

class TempDir {
 public:
  explicit TempDir(const fs::path& root) : path_(MakeTempDir(root)) {}
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

std::string_view ExecStatusName(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk:
      return "ok";
    case ExecStatus::kCompileError:
      return "compile_error";
    case ExecStatus::kRuntimeError:
      return "runtime_error";
    case ExecStatus::kTimeout:
      return "timeout";
  }
  return "unknown";
}

std::string ExecResult::Describe() const {
  std::string out(ExecStatusName(status));
  if (status != ExecStatus::kOk) {
    out += " (exit " + std::to_string(exit_code) + ")";
    std::string detail;
    for (const auto& line : SplitLines(stderr_text)) {
      if (!Trim(line).empty()) detail = std::string(Trim(line));
    }
    if (!detail.empty()) out += ": " + detail;
  }
  return out;
}

struct ExecOracle::Impl {
  explicit Impl(OracleOptions opts)
      : options(std::move(opts)),
        slots(options.max_parallel > 0
                  ? options.max_parallel
                  : std::max(1u, std::thread::hardware_concurrency())) {
    if (options.scratch_root.empty()) {
      options.scratch_root =
          fs::temp_directory_path() / ("fpa-oracle-" + std::to_string(getuid()));
    }
    fs::create_directories(options.scratch_root / "bin");
  }

  OracleOptions options;
  std::counting_semaphore<1 << 20> slots;

  std::mutex tool_mu;
  std::map<Language, std::optional<fs::path>> tools;
  std::map<Language, std::string> versions;
  std::optional<fs::path> go_cache;

  std::mutex memo_mu;
  std::map<std::string, ExecResult> memo;

  std::optional<fs::path> Resolve(Language language) {
    std::lock_guard lock(tool_mu);
    auto it = tools.find(language);
    if (it != tools.end()) return it->second;
    std::optional<fs::path> found;
    auto ov = options.toolchains.paths.find(language);
    if (ov != options.toolchains.paths.end()) {
      if (access(ov->second.c_str(), X_OK) == 0) found = ov->second;
    } else {
      for (const auto& name : DefaultToolNames(language)) {
        if ((found = FindOnPath(name))) break;
      }
      if (found && language == Language::kRust) {
        // Resolve the rustup proxy to the real compiler so the sandboxed
        // compile does not depend on rustup state.
        ProcessSpec spec;
        spec.argv = {found->string(), "--print", "sysroot"};
        spec.env = BaseEnv(options.scratch_root);
        spec.working_dir = options.scratch_root;
        spec.writable = {options.scratch_root};
        spec.deny_network = false;
        ProcessResult r = RunProcess(spec);
        fs::path real = fs::path(FirstLine(r.stdout_text)) / "bin" / "rustc";
        if (r.exit_code == 0 && access(real.c_str(), X_OK) == 0) found = real;
      }
    }
    tools[language] = found;
    return found;
  }

  fs::path Require(Language language) {
    if (!IsExecutable(language)) {
      throw ValidationError("language '" + std::string(LanguageName(language)) +
                            "' cannot be executed");
    }
    auto path = Resolve(language);
    if (!path) {
      throw EnvironmentError("toolchain for language '" +
                             std::string(LanguageName(language)) +
                             "' not found");
    }
    return *path;
  }

  fs::path GoCache() {
    {
      std::lock_guard lock(tool_mu);
      if (go_cache) return *go_cache;
    }
    fs::path cache = options.go_cache;
    if (cache.empty()) {
      ProcessSpec spec;
      spec.argv = {Require(Language::kGo).string(), "env", "GOCACHE"};
      spec.env = BaseEnv(options.scratch_root);
      if (const char* home = std::getenv("HOME")) {
        spec.env.push_back(std::string("HOME=") + home);
      }
      spec.working_dir = options.scratch_root;
      spec.deny_network = false;
      ProcessResult r = RunProcess(spec);
      cache = FirstLine(r.stdout_text);
      if (r.exit_code != 0 || cache.empty() || cache == "off") {
        cache = options.scratch_root / "go-cache";
      }
    }
    fs::create_directories(cache);
    std::lock_guard lock(tool_mu);
    go_cache = cache;
    return cache;
  }

  static std::vector<std::string> BaseEnv(const fs::path& workdir) {
    std::vector<std::string> env;
    const char* path = std::getenv("PATH");
    env.push_back(std::string("PATH=") + (path ? path : "/usr/bin:/bin"));
    env.push_back("LANG=C.UTF-8");
    env.push_back("TMPDIR=" + workdir.string());
    for (const char* key : {"RUSTUP_HOME", "CARGO_HOME", "RUSTUP_TOOLCHAIN"}) {
      if (const char* v = std::getenv(key)) env.push_back(std::string(key) + "=" + v);
    }
    return env;
  }

  std::vector<std::string> RunEnv(const fs::path& workdir) {
    auto env = BaseEnv(workdir);
    env.push_back("HOME=" + workdir.string());
    env.push_back("PYTHONDONTWRITEBYTECODE=1");
    env.push_back("PYTHONIOENCODING=utf-8");
    return env;
  }

  ExecResult FromProcess(const ProcessResult& p, bool compile_step) {
    ExecResult r;
    r.stdout_normalized = NormalizeOutput(p.stdout_text);
    r.stderr_text = p.stderr_text;
    r.duration = p.duration;
    r.exit_code = p.exit_code;
    r.output_truncated = p.truncated;
    if (p.timed_out) {
      r.status = ExecStatus::kTimeout;
    } else if (compile_step) {
      r.status = p.exit_code == 0 ? ExecStatus::kOk : ExecStatus::kCompileError;
    } else if (p.exit_code == 0) {
      r.status = ExecStatus::kOk;
    } else {
      r.status = ExecStatus::kRuntimeError;
    }
    return r;
  }

  // Compiles `program` (compiled languages) into the binary cache and returns
  // the cached binary path, or the compile failure.
  std::variant<fs::path, ExecResult> Compile(Language language,
                                             std::string_view program,
                                             const ExecLimits& limits) {
    std::string key = Sha256Hex(std::string(LanguageName(language)) + '\0' +
                                std::string(program));
    fs::path cached = options.scratch_root / "bin" / key;
    if (fs::exists(cached)) return cached;

    TempDir dir(options.scratch_root);
    fs::path src = dir.path() / ProgramFileName(language);
    WriteFile(src, program);
    fs::path out = dir.path() / "prog";
    ProcessSpec spec;
    spec.working_dir = dir.path();
    spec.env = RunEnv(dir.path());
    spec.writable = {dir.path()};
    spec.timeout = limits.compile_timeout;
    spec.max_output = limits.max_output;
    fs::path tool = Require(language);
    switch (language) {
      case Language::kC:
        spec.argv = {tool.string(), "-std=gnu11", "-O0", "-w", "-o", out.string(),
                     src.string(), "-lm"};
        break;
      case Language::kRust:
        spec.argv = {tool.string(), "--edition", "2021", "-A", "warnings", "-o",
                     out.string(), src.string()};
        break;
      case Language::kGo: {
        fs::path cache = GoCache();
        spec.argv = {tool.string(), "build", "-o", out.string(), src.string()};
        spec.env.push_back("GOCACHE=" + cache.string());
        spec.env.push_back("GOPATH=" + (dir.path() / "gopath").string());
        spec.env.push_back("GOTOOLCHAIN=local");
        spec.env.push_back("GOPROXY=off");
        spec.env.push_back("GOFLAGS=-buildvcs=false");
        spec.env.push_back("CGO_ENABLED=0");
        spec.writable.push_back(cache);
        break;
      }
      default:
        throw ValidationError("not a compiled language");
    }
    ExecResult r = FromProcess(RunProcess(spec), /*compile_step=*/true);
    if (!r.ok()) return r;
    // Publish atomically; concurrent compiles of the same program race
    // harmlessly.
    fs::path staged = options.scratch_root / "bin" / (key + ".tmp." +
                                                      dir.path().filename().string());
    fs::copy_file(out, staged, fs::copy_options::overwrite_existing);
    fs::permissions(staged, fs::perms::owner_all);
    fs::rename(staged, cached);
    return cached;
  }

  ExecResult Run(Language language, std::string_view program,
                 const ExecLimits& limits, bool check_only, std::atomic<long>& runs) {
    if (limits.wall_timeout.count() <= 0) {
      throw ValidationError("wall_timeout must be positive");
    }
    fs::path tool = Require(language);
    slots.acquire();
    struct Release {
      std::counting_semaphore<1 << 20>& s;
      ~Release() { s.release(); }
    } release{slots};

    fs::path binary;
    if (IsCompiled(language)) {
      auto compiled = Compile(language, program, limits);
      if (auto* failure = std::get_if<ExecResult>(&compiled)) return *failure;
      binary = std::get<fs::path>(compiled);
      if (check_only) return ExecResult{};
    }

    TempDir dir(options.scratch_root);
    ProcessSpec spec;
    spec.working_dir = dir.path();
    spec.env = RunEnv(dir.path());
    spec.writable = {dir.path()};
    spec.timeout = limits.wall_timeout;
    spec.max_output = limits.max_output;

    if (language == Language::kPython) {
      fs::path src = dir.path() / ProgramFileName(language);
      WriteFile(src, program);
      spec.argv = {tool.string(), "-c", std::string(kPythonBootstrap), src.string()};
      if (check_only) spec.argv.push_back("--check");
      ExecResult r = FromProcess(RunProcess(spec), false);
      if (!check_only) ++runs;
      if (r.status == ExecStatus::kRuntimeError && r.exit_code == kPythonSyntaxExit) {
        r.status = ExecStatus::kCompileError;
      }
      return r;
    }
    if (language == Language::kJavaScript) {
      fs::path src = dir.path() / ProgramFileName(language);
      WriteFile(src, program);
      spec.argv = {tool.string(), "--check", src.string()};
      ExecResult checked = FromProcess(RunProcess(spec), true);
      if (!checked.ok() || check_only) return checked;
      spec.argv = {tool.string(), src.string()};
      ++runs;
      return FromProcess(RunProcess(spec), false);
    }
    spec.argv = {binary.string()};
    ++runs;
    return FromProcess(RunProcess(spec), false);
  }
};

ExecOracle::ExecOracle(OracleOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

ExecOracle::~ExecOracle() = default;

ExecResult ExecOracle::Execute(const CodeUnit& unit, const ExecLimits& limits) const {
  return ExecuteProgram(unit.language, AssembleProgram(unit), limits);
}

ExecResult ExecOracle::ExecuteProgram(Language language, std::string_view program,
                                      const ExecLimits& limits) const {
  return impl_->Run(language, program, limits, /*check_only=*/false, run_count_);
}

ExecResult ExecOracle::ExecuteMemoized(const CodeUnit& unit,
                                       const ExecLimits& limits) const {
  return ExecuteProgramMemoized(unit.language, AssembleProgram(unit), limits);
}

ExecResult ExecOracle::ExecuteProgramMemoized(Language language,
                                              std::string_view program,
                                              const ExecLimits& limits) const {
  std::string key = Sha256Hex(std::string(LanguageName(language)) + '\0' +
                              std::string(program) + '\0' +
                              std::to_string(limits.wall_timeout.count()) + '\0' +
                              std::to_string(limits.max_output));
  {
    std::lock_guard lock(impl_->memo_mu);
    auto it = impl_->memo.find(key);
    if (it != impl_->memo.end()) return it->second;
  }
  ExecResult r = ExecuteProgram(language, program, limits);
  std::lock_guard lock(impl_->memo_mu);
  impl_->memo.emplace(key, r);
  return r;
}

ExecResult ExecOracle::CheckSyntax(Language language, std::string_view program,
                                   const ExecLimits& limits) const {
  return impl_->Run(language, program, limits, /*check_only=*/true, run_count_);
}

bool ExecOracle::CheckDeterministic(const CodeUnit& unit,
                                    const ExecLimits& limits) const {
  std::string program = AssembleProgram(unit);
  ExecResult first = ExecuteProgram(unit.language, program, limits);
  if (!first.ok()) {
    throw ValidationError("execution failed: " + first.Describe());
  }
  ExecResult second = ExecuteProgram(unit.language, program, limits);
  if (!second.ok()) {
    throw ValidationError("execution failed on second run: " + second.Describe());
  }
  return Equivalent(first, second);
}

bool ExecOracle::HasToolchain(Language language) const {
  return IsExecutable(language) && impl_->Resolve(language).has_value();
}

std::filesystem::path ExecOracle::ToolchainPath(Language language) const {
  return impl_->Require(language);
}

std::string ExecOracle::ToolchainVersion(Language language) const {
  {
    std::lock_guard lock(impl_->tool_mu);
    auto it = impl_->versions.find(language);
    if (it != impl_->versions.end()) return it->second;
  }
  std::string version = "unavailable";
  if (auto tool = impl_->Resolve(language)) {
    ProcessSpec spec;
    spec.argv = {tool->string(), language == Language::kGo ? "version" : "--version"};
    spec.env = Impl::BaseEnv(impl_->options.scratch_root);
    spec.env.push_back("HOME=" + impl_->options.scratch_root.string());
    spec.working_dir = impl_->options.scratch_root;
    spec.writable = {impl_->options.scratch_root};
    spec.deny_network = false;
    ProcessResult r = RunProcess(spec);
    std::string line = FirstLine(r.stdout_text.empty() ? r.stderr_text : r.stdout_text);
    if (!line.empty()) version = line;
  }
  std::lock_guard lock(impl_->tool_mu);
  impl_->versions[language] = version;
  return version;
}

bool Equivalent(const ExecResult& a, const ExecResult& b) {
  if (!a.ok() || !b.ok()) {
    throw NotComparableError("cannot compare executions with status " +
                             std::string(ExecStatusName(a.status)) + " and " +
                             std::string(ExecStatusName(b.status)));
  }
  return a.stdout_normalized == b.stdout_normalized && a.exit_code == b.exit_code;
}

}  // namespace fpa
