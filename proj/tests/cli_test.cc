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

// Drives the fpa binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "json.hpp"

#include "fpa/text_util.h"
#include "test_paths.h"

namespace fpa {
namespace {

using ::fpa::testing::ScratchDir;
using ::fpa::testing::SourceRoot;
using nlohmann::json;
namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun Fpa(const std::string& args, const std::string& env = {}) {
  std::string cmd = env + (env.empty() ? "" : " ") + std::string(FPA_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Root(const char* rel) { return (SourceRoot() / rel).string(); }

fs::path WriteConfig(const std::string& name, json config) {
  fs::path dir = ScratchDir("cli-" + name);
  config["cache_dir"] = (dir / "cache").string();
  config["output_dir"] = (dir / "report").string();
  WriteFile(dir / "config.json", config.dump(2));
  return dir / "config.json";
}

json Scripted(const std::string& id, const std::string& behavior) {
  return {{"id", id}, {"kind", "scripted"}, {"model", id}, {"script", {{"behavior", behavior}}}};
}

json EvalConfig() {
  return {{"providers", {Scripted("bias", "bias"), Scripted("faithful", "faithful")}},
          {"corpus", {Root("corpus/seed")}},
          {"targets", {"luhn", "roman"}},
          {"n_trials", 3},
          {"compute_risk", true}};
}

TEST(CliTest, ValidatesTheSeedCorpus) {
  CliRun r = Fpa("corpus validate " + Root("corpus/seed"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("3 patterns, 50 targets valid, 0 invalid"), std::string::npos) << r.out;
}

TEST(CliTest, CorruptedRecordFailsValidation) {
  fs::path dir = ScratchDir("cli-corrupt");
  fs::copy(Root("corpus/seed"), dir / "seed", fs::copy_options::recursive);
  fs::path record = dir / "seed" / "patterns" / "lswr.json";
  json j = json::parse(ReadFile(record));
  j["actual_value"] = "3";
  WriteFile(record, j.dump(2));
  CliRun r = Fpa("corpus validate " + (dir / "seed").string());
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("INVALID lswr"), std::string::npos) << r.out;
}

TEST(CliTest, MissingCorpusIsAUsageError) {
  EXPECT_EQ(Fpa("corpus validate /nonexistent/corpus").code, 2);
  EXPECT_EQ(Fpa("frobnicate").code, 2);
  EXPECT_EQ(Fpa("eval").code, 2);
}

TEST(CliTest, AttackComposesAndVerifies) {
  fs::path out = ScratchDir("cli-attack");
  CliRun r = Fpa("attack luhn --pattern vowel --corpus " + Root("corpus/seed") + " --out " +
              out.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("oracle equivalence: PASS"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("behavior change:    PASS"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(out / "luhn__vowel__inject_phantom.py"));

  CliRun file = Fpa("attack " + Root("corpus/seed/targets/roman.json") +
                 " --pattern lswr --json --corpus " + Root("corpus/seed"));
  ASSERT_EQ(file.code, 0) << file.out;
  json j = json::parse(file.out);
  EXPECT_TRUE(j["preserved"].get<bool>());
  EXPECT_TRUE(j["pattern_matters"].get<bool>());
  EXPECT_NE(j["composed_output"], j["unperturbed_output"]);

  EXPECT_EQ(Fpa("attack luhn --pattern nosuch --corpus " + Root("corpus/seed")).code, 2);
}

TEST(CliTest, AttackSearchWithScriptedProviders) {
  fs::path bias = WriteConfig("search-bias", {{"providers", {Scripted("bias", "bias")}}});
  CliRun r = Fpa("attack luhn --json --corpus " + Root("corpus/seed") + " --config " +
              bias.string());
  ASSERT_EQ(r.code, 0) << r.out;
  json j = json::parse(r.out);
  EXPECT_TRUE(j["search"]["succeeded"].get<bool>());
  EXPECT_EQ(j["search"]["attempts"], 1);

  fs::path faithful =
      WriteConfig("search-faithful", {{"providers", {Scripted("faithful", "faithful")}}});
  CliRun f = Fpa("attack luhn --corpus " + Root("corpus/seed") + " --config " + faithful.string());
  EXPECT_EQ(f.code, 1) << f.out;
  EXPECT_NE(f.out.find("search: failed"), std::string::npos) << f.out;
}

TEST(CliTest, MiningIsDeterministic) {
  json miner = {{"id", "miner"},
                {"kind", "scripted"},
                {"model", "miner"},
                {"script", {{"behavior", "miner"}, {"success_every", 10}}}};
  fs::path config = WriteConfig("mine", {{"providers", {miner}}});
  fs::path csv = config.parent_path() / "curve.csv";
  CliRun r = Fpa("mine --json --max-patterns 20 -n 1 --jobs 3 --config " + config.string() +
              " --csv " + csv.string());
  ASSERT_EQ(r.code, 0) << r.out;
  json j = json::parse(r.out);
  EXPECT_EQ(j["unique_successes"], 2);
  EXPECT_EQ(j["patterns_tried"], 20);
  EXPECT_EQ(j["perturbation_attempts"], 1);
  auto lines = SplitLines(ReadFile(csv));
  ASSERT_EQ(lines.size(), 21u);
  EXPECT_EQ(lines[0], "pattern_index,succeeded,calls_used,duplicate");
  EXPECT_EQ(lines[10].substr(0, 5), "10,1,");
}

TEST(CliTest, MissingCredentialsStopBeforeAnyCall) {
  json remote = {{"id", "gpt"},
                 {"kind", "openai"},
                 {"model", "gpt-4o"},
                 {"credentials_env", "FPA_TEST_UNSET_KEY"}};
  fs::path config = WriteConfig("auth", {{"providers", {remote}}});
  CliRun r = Fpa("mine --max-patterns 1 --config " + config.string(), "env -u FPA_TEST_UNSET_KEY");
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("FPA_TEST_UNSET_KEY"), std::string::npos) << r.out;
}

TEST(CliTest, OfflineRefusesRemoteProviders) {
  json remote = {{"id", "gpt"},
                 {"kind", "openai"},
                 {"model", "gpt-4o"},
                 {"endpoint", "http://127.0.0.1:9"},
                 {"credentials_env", "FPA_TEST_KEY"}};
  json config = EvalConfig();
  config["providers"] = {remote};
  fs::path file = WriteConfig("offline", config);
  CliRun r = Fpa("eval --offline " + file.string(), "FPA_TEST_KEY=dummy");
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("offline"), std::string::npos) << r.out;
}

TEST(CliTest, KeysInConfigFilesAreRejected) {
  json remote = {{"id", "gpt"}, {"kind", "openai"}, {"model", "gpt-4o"}, {"api_key", "sk-x"}};
  fs::path file = WriteConfig("inline-key", {{"providers", {remote}}});
  EXPECT_EQ(Fpa("eval " + file.string()).code, 2);
}

TEST(CliTest, EvalReportIsByteStableOnReplay) {
  fs::path config = WriteConfig("eval", EvalConfig());
  fs::path dir = config.parent_path();
  CliRun first = Fpa("eval " + config.string() + " --out " + (dir / "a").string());
  ASSERT_EQ(first.code, 0) << first.out;
  CliRun second = Fpa("eval " + config.string() + " --jobs 3 --out " + (dir / "b").string());
  ASSERT_EQ(second.code, 0) << second.out;
  for (const char* f : {"report.csv", "aggregates.csv", "report.txt", "report.json"}) {
    EXPECT_EQ(ReadFile(dir / "a" / f), ReadFile(dir / "b" / f)) << f;
  }
  json log = json::parse(ReadFile(dir / "b" / "run_log.json"));
  EXPECT_EQ(log["backend_calls"], 0);
  EXPECT_EQ(log["network_calls"], 0);
  json report = json::parse(ReadFile(dir / "a" / "report.json"));
  EXPECT_EQ(report["manifest"]["run"]["config_sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(report["manifest"]["config"]["prompt_mode"], "plain");
}

TEST(CliTest, RobustFlagAndConditionFilter) {
  fs::path config = WriteConfig("eval-flags", EvalConfig());
  fs::path out = config.parent_path() / "robust";
  CliRun r = Fpa("eval " + config.string() + " --robust --conditions attack --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  json report = json::parse(ReadFile(out / "report.json"));
  EXPECT_EQ(report["manifest"]["config"]["prompt_mode"], "robust");
  for (const auto& cell : report["cells"]) {
    EXPECT_EQ(cell["condition"], "attack");
    EXPECT_EQ(cell["prompt_mode"], "robust");
  }
  EXPECT_EQ(Fpa("eval " + config.string() + " --conditions dirty").code, 2);
}

json DefenseConfig() {
  json c = {{"providers", {Scripted("bias", "bias"), Scripted("echo", "echo"),
                           Scripted("faithful", "faithful")}},
            {"corpus", {Root("corpus/seed")}},
            {"targets", {"luhn"}},
            {"n_trials", 2},
            {"defense", {{"fixtures", Root("fixtures/html")}, {"patterns", Root("corpus/web")}}}};
  return c;
}

TEST(CliTest, DefendScrapeWritesArmoredPagesAndTable) {
  fs::path config = WriteConfig("scrape", DefenseConfig());
  fs::path dir = config.parent_path();
  CliRun r = Fpa("defend scrape " + config.string() + " --armored-dir " + (dir / "armored").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "armored" / "bakery-hours.armored.html"));
  EXPECT_NE(r.out.find("Anti web scraping"), std::string::npos) << r.out;
  std::string csv = ReadFile(dir / "report" / "defense.csv");
  CliRun again = Fpa("defend scrape " + config.string() + " --jobs 2 --armored-dir " +
                  (dir / "armored").string());
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(ReadFile(dir / "report" / "defense.csv"), csv);
}

TEST(CliTest, DefendPlagiarism) {
  fs::path config = WriteConfig("plagiarism", DefenseConfig());
  CliRun r = Fpa("defend plagiarism --json " + config.string());
  ASSERT_EQ(r.code, 0) << r.out;
  json j = json::parse(r.out);
  EXPECT_EQ(j["results"].size(), 3u * 3u * 2u);
}

TEST(CliTest, DefendWithEmptyFixturesGivesHeaderOnlyReport) {
  json c = DefenseConfig();
  fs::path empty = ScratchDir("cli-empty-fixtures");
  c["defense"]["fixtures"] = empty.string();
  fs::path config = WriteConfig("scrape-empty", c);
  CliRun r = Fpa("defend scrape " + config.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(ReadFile(config.parent_path() / "report" / "defense.csv"),
            "study,provider,sample,arm,n,defended,defense_rate,model_rate\n");
}

TEST(CliTest, ScrapeWithoutNodeIsAnEnvironmentError) {
  fs::path config = WriteConfig("scrape-nonode", DefenseConfig());
  CliRun r = Fpa("defend scrape " + config.string(), "PATH=/nonexistent");
  EXPECT_EQ(r.code, 3) << r.out;
}

}  // namespace
}  // namespace fpa
