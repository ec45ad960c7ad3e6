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

#include <gtest/gtest.h>

#include <random>

#include <unistd.h>

#include "fpa/errors.h"
#include "fpa/sandbox.h"

namespace fpa {
namespace {

ExecOracle& Oracle() {
  static ExecOracle oracle;
  return oracle;
}

CodeUnit Py(std::string source, std::string invocation) {
  return CodeUnit{Language::kPython, std::move(source), std::move(invocation)};
}

TEST(ExecOracleTest, RunsPython) {
  ExecResult r = Oracle().Execute(Py("def f(x):\n    return x * 2\n", "f(21)"));
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "42");
}

TEST(ExecOracleTest, PythonSyntaxErrorIsCompileError) {
  ExecResult r = Oracle().Execute(Py("def f(:\n", "f()"));
  EXPECT_EQ(r.status, ExecStatus::kCompileError);
}

TEST(ExecOracleTest, Timeout) {
  ExecLimits limits;
  limits.wall_timeout = std::chrono::milliseconds(2000);
  ExecResult r = Oracle().Execute(Py("while True:\n    pass\n", "1"), limits);
  EXPECT_EQ(r.status, ExecStatus::kTimeout);
}

TEST(ExecOracleTest, RunsC) {
  CodeUnit u{Language::kC, "int twice(int x) { return 2 * x; }\n", "twice(21)"};
  ExecResult r = Oracle().Execute(u);
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "42");
}

TEST(ExecOracleTest, RunsRust) {
  CodeUnit u{Language::kRust, "fn twice(x: i64) -> i64 { 2 * x }\n", "twice(21)"};
  ExecResult r = Oracle().Execute(u);
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "42");
}

TEST(ExecOracleTest, RunsGo) {
  CodeUnit u{Language::kGo, "func twice(x int) int { return 2 * x }\n", "twice(21)"};
  ExecResult r = Oracle().Execute(u);
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "42");
}

TEST(ExecOracleTest, RunsJavaScript) {
  CodeUnit u{Language::kJavaScript, "function twice(x) { return 2 * x; }\n", "twice(21)"};
  ExecResult r = Oracle().Execute(u);
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "42");
}

TEST(ExecOracleTest, OutputIsNormalized) {
  ExecResult r = Oracle().Execute(Py("x = 0\n", "'a  \\r\\nb   \\n\\n'"));
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "a\nb");
  EXPECT_EQ(r.exit_code, 0);
}

TEST(ExecOracleTest, RuntimeErrorKeepsExitCode) {
  ExecResult r = Oracle().Execute(Py("def f():\n    return 1 // 0\n", "f()"));
  EXPECT_EQ(r.status, ExecStatus::kRuntimeError);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.stderr_text.find("ZeroDivisionError"), std::string::npos);
}

TEST(ExecOracleTest, CCompileErrorIsDistinct) {
  CodeUnit u{Language::kC, "int broken(int x) { return x +; }\n", "broken(1)"};
  EXPECT_EQ(Oracle().Execute(u).status, ExecStatus::kCompileError);
}

TEST(ExecOracleTest, MissingToolchainIsEnvironmentError) {
  OracleOptions options;
  options.toolchains.paths[Language::kRust] = "/nonexistent/rustc";
  ExecOracle oracle(options);
  EXPECT_FALSE(oracle.HasToolchain(Language::kRust));
  CodeUnit u{Language::kRust, "fn one() -> i64 { 1 }\n", "one()"};
  EXPECT_THROW(oracle.Execute(u), EnvironmentError);
}

TEST(ExecOracleTest, SeedValues) {
  const char* lswr =
      "def LSWR(s):\n"
      "    char_index_map = {}\n"
      "    longest = 0\n"
      "    start = 0\n"
      "    for end, char in enumerate(s):\n"
      "        if char in char_index_map and char_index_map[char] > start:\n"
      "            start = char_index_map[char] + 1\n"
      "        char_index_map[char] = end\n"
      "        longest = max(longest, end - start + 1)\n"
      "    return longest\n";
  EXPECT_EQ(Oracle().Execute(Py(lswr, "LSWR(\"pwwkew\")")).stdout_normalized, "4");
  EXPECT_EQ(Oracle()
                .Execute(Py("def is_vowel(c):\n    return c in \"aeioAEIOU\"\n", "is_vowel('u')"))
                .stdout_normalized,
            "False");
}

TEST(EquivalentTest, ComparesStdoutAndExitCodeOnly) {
  ExecResult a = Oracle().Execute(Py("x = 0\n", "'3\\n'"));
  ExecResult b = Oracle().Execute(Py("import sys\nsys.stderr.write('noise')\n", "3"));
  ExecResult c = Oracle().Execute(Py("x = 0\n", "4"));
  EXPECT_TRUE(Equivalent(a, b));
  EXPECT_FALSE(Equivalent(b, c));
  ExecLimits limits;
  limits.wall_timeout = std::chrono::milliseconds(1000);
  ExecResult t = Oracle().Execute(Py("while True:\n    pass\n", "1"), limits);
  EXPECT_THROW(Equivalent(a, t), NotComparableError);
}

TEST(EquivalentTest, IsAnEquivalenceRelation) {
  std::mt19937 rng(5);
  auto draw = [&] {
    ExecResult r;
    r.stdout_normalized = std::string(1, "abc"[rng() % 3]);
    return r;
  };
  for (int i = 0; i < 200; ++i) {
    ExecResult x = draw(), y = draw(), z = draw();
    EXPECT_TRUE(Equivalent(x, x));
    EXPECT_EQ(Equivalent(x, y), Equivalent(y, x));
    if (Equivalent(x, y) && Equivalent(y, z)) EXPECT_TRUE(Equivalent(x, z));
  }
}

TEST(DeterminismTest, PureFunctionIsDeterministic) {
  CodeUnit u = Py("def f(n):\n    return sum(range(n))\n", "f(100)");
  EXPECT_TRUE(Oracle().CheckDeterministic(u));
  std::vector<ExecResult> runs;
  for (int i = 0; i < 5; ++i) runs.push_back(Oracle().Execute(u));
  for (const auto& r : runs) EXPECT_TRUE(Equivalent(r, runs[0]));
}

TEST(DeterminismTest, RandomAndClockAreNot) {
  EXPECT_FALSE(Oracle().CheckDeterministic(Py("import random\n", "random.random()")));
  EXPECT_FALSE(Oracle().CheckDeterministic(Py("import time\n", "time.time_ns()")));
}

TEST(SandboxTest, NetworkIsUnreachable) {
  if (!ProbeSandbox().network_namespace) GTEST_SKIP() << "no network namespaces";
  const char* src =
      "import socket\n"
      "def probe():\n"
      "    s = socket.socket()\n"
      "    s.settimeout(2)\n"
      "    try:\n"
      "        s.connect(('1.1.1.1', 53))\n"
      "        return 'connected'\n"
      "    except OSError:\n"
      "        return 'blocked'\n";
  ExecResult r = Oracle().Execute(Py(src, "probe()"));
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "blocked");
}

TEST(SandboxTest, WritesOutsideTempDirAreRefused) {
  if (ProbeSandbox().landlock_abi == 0) GTEST_SKIP() << "no landlock";
  std::filesystem::path outside =
      std::filesystem::temp_directory_path() / ("fpa-escape-" + std::to_string(::getpid()));
  std::filesystem::remove(outside);
  std::string src =
      "def probe():\n"
      "    try:\n"
      "        open('" + outside.string() + "', 'w').write('x')\n"
      "        return 'written'\n"
      "    except OSError:\n"
      "        return 'refused'\n"
      "def local():\n"
      "    open('scratch.txt', 'w').write('x')\n"
      "    return open('scratch.txt').read()\n";
  ExecResult r = Oracle().Execute(Py(src, "(probe(), local())"));
  ASSERT_TRUE(r.ok()) << r.Describe();
  EXPECT_EQ(r.stdout_normalized, "('refused', 'x')");
  EXPECT_FALSE(std::filesystem::exists(outside));
}

}  // namespace
}  // namespace fpa
