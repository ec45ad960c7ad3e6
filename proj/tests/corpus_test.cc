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

#include "fpa/corpus.h"

#include <gtest/gtest.h>

#include "fpa/errors.h"
#include "fpa/text_util.h"
#include "test_paths.h"

namespace fpa {
namespace {

using ::fpa::testing::CorpusDir;
using ::fpa::testing::ScratchDir;

ExecOracle& Oracle() {
  static ExecOracle oracle;
  return oracle;
}

TEST(CorpusTest, SeedCorpusHasThreeRecords) {
  Corpus c = LoadCorpus(CorpusDir("seed"));
  ASSERT_TRUE(c.ok()) << c.problems.front().message;
  ASSERT_EQ(c.patterns.size(), 3u);
  EXPECT_EQ(c.Pattern("lswr").familiar_value, "3");
  EXPECT_EQ(c.Pattern("lswr").actual_value, "4");
  EXPECT_EQ(c.Pattern("vowel").actual_value, "False");
  EXPECT_EQ(c.Pattern("fastpow").actual_value, "0");
  EXPECT_EQ(c.targets.size(), 50u);
}

TEST(CorpusTest, EmptyDirectoryIsEmptyCorpus) {
  Corpus c = LoadCorpus(ScratchDir("corpus-empty"));
  EXPECT_TRUE(c.ok());
  EXPECT_TRUE(c.patterns.empty());
  EXPECT_TRUE(c.targets.empty());
}

TEST(CorpusTest, MissingDirectoryIsUsageError) {
  EXPECT_THROW(LoadCorpus(ScratchDir("corpus-missing") / "nope"), UsageError);
}

TEST(CorpusTest, EqualValuesAreReported) {
  auto dir = ScratchDir("corpus-equal");
  Corpus seed = LoadCorpus(CorpusDir("seed"));
  DeceptionPatternRecord r = seed.Pattern("vowel");
  SaveRecord(dir, r);
  auto json_path = dir / "patterns" / "vowel.json";
  WriteFile(json_path, ReplaceAll(ReadFile(json_path), "\"False\"", "\"True\""));
  Corpus c = LoadCorpus(dir);
  ASSERT_EQ(c.problems.size(), 1u);
  EXPECT_NE(c.problems[0].message.find("deception invariant"), std::string::npos);
  EXPECT_TRUE(c.patterns.empty());
}

TEST(CorpusTest, SchemaViolationNamesField) {
  auto dir = ScratchDir("corpus-schema");
  Corpus seed = LoadCorpus(CorpusDir("seed"));
  SaveRecord(dir, seed.Pattern("lswr"));
  auto json_path = dir / "patterns" / "lswr.json";
  WriteFile(json_path, ReplaceAll(ReadFile(json_path), "\"delta_description\"", "\"delta\""));
  Corpus c = LoadCorpus(dir);
  ASSERT_EQ(c.problems.size(), 1u);
  EXPECT_NE(c.problems[0].message.find("delta_description"), std::string::npos);
}

TEST(CorpusTest, DuplicateIdReported) {
  auto dir = ScratchDir("corpus-dup");
  Corpus seed = LoadCorpus(CorpusDir("seed"));
  SaveRecord(dir, seed.Pattern("lswr"));
  WriteFile(dir / "manifest.json", "{\"patterns\": [\"lswr\", \"lswr\"], \"targets\": []}");
  Corpus c = LoadCorpus(dir);
  EXPECT_EQ(c.patterns.size(), 1u);
  ASSERT_EQ(c.problems.size(), 1u);
  EXPECT_NE(c.problems[0].message.find("duplicate"), std::string::npos);
}

TEST(CorpusTest, RoundTrip) {
  auto dir = ScratchDir("corpus-roundtrip");
  Corpus seed = LoadCorpora({CorpusDir("seed"), CorpusDir("universality"), CorpusDir("web")});
  ASSERT_TRUE(seed.ok());
  SaveCorpus(dir, seed);
  Corpus again = LoadCorpus(dir);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again.patterns, seed.patterns);
  EXPECT_EQ(again.targets, seed.targets);
}

TEST(CorpusTest, EveryShippedRecordValidates) {
  Corpus c = LoadCorpora({CorpusDir("seed"), CorpusDir("universality"), CorpusDir("web")});
  ASSERT_EQ(c.patterns.size(), 15u);
  for (const auto& r : c.patterns) {
    ValidationReport rep = ValidateRecord(r, Oracle());
    EXPECT_TRUE(rep.valid) << r.id << ": " << Join(rep.diagnostics, "; ");
  }
}

TEST(CorpusTest, EveryShippedTargetValidates) {
  Corpus c = LoadCorpora({CorpusDir("seed"), CorpusDir("universality")});
  ASSERT_EQ(c.targets.size(), 80u);
  for (const auto& t : c.targets) {
    ValidationReport rep = ValidateTarget(t, Oracle());
    EXPECT_TRUE(rep.valid) << t.id << ": " << Join(rep.diagnostics, "; ");
  }
}

TEST(CorpusTest, NonTerminatingVariantIsInvalid) {
  DeceptionPatternRecord r = LoadCorpus(CorpusDir("seed")).Pattern("vowel");
  r.deceptive.source = "def is_vowel(c):\n    while True:\n        pass\n";
  ExecLimits limits;
  limits.wall_timeout = std::chrono::milliseconds(1500);
  ValidationReport rep = ValidateRecord(r, Oracle(), limits);
  EXPECT_FALSE(rep.valid);
  ASSERT_FALSE(rep.diagnostics.empty());
  EXPECT_NE(Join(rep.diagnostics, ";").find("timeout"), std::string::npos);
}

TEST(CorpusTest, ValidationWithOracleServesOnlyVerified) {
  auto dir = ScratchDir("corpus-verify");
  Corpus seed = LoadCorpus(CorpusDir("seed"));
  TargetProgram t = seed.targets.front();
  t.expected_output = "wrong";
  SaveTarget(dir, t);
  LoadOptions opts;
  opts.oracle = &Oracle();
  Corpus c = LoadCorpus(dir, opts);
  EXPECT_TRUE(c.targets.empty());
  EXPECT_EQ(c.problems.size(), 1u);
}

}  // namespace
}  // namespace fpa
