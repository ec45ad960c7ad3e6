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

#include "fpa/evaluator.h"

#include <gtest/gtest.h>

#include <cstdio>
#include <memory>

#include "fpa/errors.h"
#include "fpa/text_util.h"
#include "test_paths.h"

namespace fpa {
namespace {

using ::fpa::testing::CorpusDir;
using ::fpa::testing::ScratchDir;
using nlohmann::json;

ExecOracle& Oracle() {
  static ExecOracle oracle;
  return oracle;
}

const Corpus& Seeds() {
  static Corpus c = LoadCorpus(CorpusDir("seed"));
  return c;
}

const Corpus& Universality() {
  static Corpus c = LoadCorpus(CorpusDir("universality"));
  return c;
}

ProviderConfig Scripted(const std::string& id, const json& script) {
  ProviderConfig c;
  c.id = id;
  c.model_name = id + "-model";
  c.script = script;
  return c;
}

struct Harness {
  std::unique_ptr<LlmGateway> gateway;
  EvalContext ctx;
  EvaluationConfig config;

  explicit Harness(std::vector<ProviderConfig> providers,
                   std::optional<std::filesystem::path> cache = std::nullopt) {
    GatewayOptions o;
    o.script.oracle = &Oracle();
    o.script.patterns = Seeds().patterns;
    for (const auto& p : Universality().patterns) o.script.patterns.push_back(p);
    o.cache_dir = cache;
    gateway = std::make_unique<LlmGateway>(o);
    for (const auto& p : providers) gateway->Register(p);
    ctx.gateway = gateway.get();
    ctx.oracle = &Oracle();
    config.providers = providers;
  }
};

json Schedule(const std::string& purpose, std::vector<std::string> responses) {
  return {{"behavior", "schedule"},
          {"rules", json::array({{{"purpose", purpose}, {"match", ""},
                                  {"responses", responses}}})}};
}

EvalSample Sample(const std::string& target, const std::string& pattern,
                  Strategy strategy = Strategy::kInjectPhantom) {
  const auto& x = Seeds().Target(target);
  return {x, Seeds().Pattern(pattern), DefaultBehavior(x.unit.language, strategy), strategy};
}

std::vector<double> Rates(const std::vector<RateResult>& rs) {
  std::vector<double> out;
  for (const auto& r : rs) out.push_back(r.rate());
  return out;
}

TEST(EvaluatorTest, FaithfulProviderIsAlwaysRight) {
  Harness h({Scripted("faithful", {{"behavior", "faithful"}})});
  h.config.n_trials = 3;
  for (const auto& record : Seeds().patterns) {
    auto rates = EvaluateConditions(h.ctx, "faithful", Sample("luhn", record.id), h.config);
    EXPECT_EQ(Rates(rates), (std::vector<double>{1.0, 1.0, 1.0})) << record.id;
  }
}

TEST(EvaluatorTest, BiasedProviderFailsOnlyUnderAttack) {
  Harness h({Scripted("bias", {{"behavior", "bias"}})});
  h.config.n_trials = 3;
  for (const auto& record : Seeds().patterns) {
    auto rates = EvaluateConditions(h.ctx, "bias", Sample("luhn", record.id), h.config);
    EXPECT_EQ(Rates(rates), (std::vector<double>{1.0, 1.0, 0.0})) << record.id;
    EXPECT_EQ(rates[2].trials.size(), 3u);
    EXPECT_EQ(rates[2].trials[0].matched_truth, false);
  }
}

TEST(EvaluatorTest, HideLogicAttackAlsoFoolsBias) {
  Harness h({Scripted("bias", {{"behavior", "bias"}})});
  h.config.n_trials = 2;
  h.config.strategy = Strategy::kHideLogic;
  auto rates = EvaluateConditions(h.ctx, "bias",
                                  Sample("caesar", "vowel", Strategy::kHideLogic), h.config);
  EXPECT_EQ(Rates(rates), (std::vector<double>{1.0, 1.0, 0.0}));
}

TEST(EvaluatorTest, SuccessRateCountsScheduledAnswers) {
  const auto& x = Seeds().Target("luhn");
  std::vector<std::string> answers(7, x.expected_output);
  answers.insert(answers.end(), {"wrong", "also wrong", "nope"});
  Harness h({Scripted("s", Schedule("predict", answers))});
  RateResult r = SuccessRate(h.ctx, "s", x.unit, h.config, x.id);
  EXPECT_EQ(r.n, 10);
  EXPECT_EQ(r.correct, 7);
  EXPECT_DOUBLE_EQ(r.rate(), 0.7);
  EXPECT_EQ(r.truth, x.expected_output);
}

TEST(EvaluatorTest, UnparseableTrialsCountAsIncorrect) {
  const auto& x = Seeds().Target("luhn");
  Harness h({Scripted("s", Schedule("predict", {x.expected_output, ""}))});
  h.config.n_trials = 2;
  RateResult r = SuccessRate(h.ctx, "s", x.unit, h.config, x.id);
  EXPECT_EQ(r.correct, 1);
  EXPECT_FALSE(r.trials[1].parsed);
}

TEST(EvaluatorTest, AdversarialRiskCountsDivergentTrials) {
  // Three of ten trials answer "1" for the second program; the first always
  // gets "0". The judge is never consulted for bare values.
  auto sample = Sample("luhn", "lswr");
  auto programs = ComposeConditions(sample, Oracle());
  json rules = json::array();
  rules.push_back({{"purpose", "predict"}, {"match", "SAFE"},
                   {"responses", {"0", "1", "0", "1", "0", "0", "1", "0", "0", "0"}}});
  rules.push_back({{"purpose", "predict"}, {"match", ""}, {"responses", {"0"}}});
  Harness h({Scripted("s", {{"behavior", "schedule"}, {"rules", rules}})});
  RiskResult risk = AdversarialRisk(h.ctx, "s", programs.at(Condition::kClean),
                                    programs.at(Condition::kAttack), h.config);
  EXPECT_EQ(risk.n, 10);
  EXPECT_EQ(risk.divergent, 3);
  EXPECT_DOUBLE_EQ(risk.rate(), 0.3);
}

TEST(EvaluatorTest, BaselineThresholdIsInclusive) {
  auto f = FilterByRates({{"a", 0.64}, {"b", 0.65}, {"c", 1.0}}, 0.65);
  EXPECT_EQ(f.retained, (std::vector<std::string>{"b", "c"}));
  ASSERT_EQ(f.dropped.size(), 1u);
  EXPECT_EQ(f.dropped[0].first, "a");
}

TEST(EvaluatorTest, RaisingTheThresholdNeverKeepsMore) {
  std::vector<std::pair<std::string, double>> rates;
  for (int i = 0; i <= 20; ++i) rates.emplace_back("t" + std::to_string(i), i / 20.0);
  std::size_t last = rates.size() + 1;
  for (int k = 0; k <= 40; ++k) {
    auto f = FilterByRates(rates, k / 40.0);
    EXPECT_LE(f.retained.size(), last);
    EXPECT_EQ(f.retained.size() + f.dropped.size(), rates.size());
    last = f.retained.size();
  }
}

TEST(EvaluatorTest, ConfigValidation) {
  EvaluationConfig c;
  c.n_trials = 0;
  EXPECT_THROW(CheckConfig(c), UsageError);
  c = {};
  c.baseline_threshold = 1.5;
  EXPECT_THROW(CheckConfig(c), UsageError);
  c = {};
  c.conditions = {Condition::kAttack, Condition::kAttack};
  EXPECT_THROW(CheckConfig(c), UsageError);
  c = {};
  c.strategy = Strategy::kControl;
  EXPECT_THROW(CheckConfig(c), UsageError);
  EXPECT_THROW(ParseCondition("dirty"), UsageError);
  EXPECT_EQ(ParseCondition("attack"), Condition::kAttack);
}

// Python's own tokenizer counts the familiar tokens and computes the token
// Levenshtein distance.
std::string PythonCostOracle(const std::filesystem::path& familiar,
                             const std::filesystem::path& deceptive) {
  std::string script =
      "import io, sys, tokenize\n"
      "skip = {tokenize.NEWLINE, tokenize.NL, tokenize.COMMENT, tokenize.INDENT,\n"
      "        tokenize.DEDENT, tokenize.ENDMARKER}\n"
      "def toks(p):\n"
      "    src = open(p).read()\n"
      "    return [t.string for t in tokenize.generate_tokens(io.StringIO(src).readline)\n"
      "            if t.type not in skip]\n"
      "a, b = toks(sys.argv[1]), toks(sys.argv[2])\n"
      "prev = list(range(len(b) + 1))\n"
      "for i in range(1, len(a) + 1):\n"
      "    cur = [i] + [0] * len(b)\n"
      "    for j in range(1, len(b) + 1):\n"
      "        cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1]))\n"
      "    prev = cur\n"
      "print(prev[len(b)], len(a))\n";
  auto dir = ScratchDir("cost-oracle");
  WriteFile(dir / "oracle.py", script);
  std::string cmd = "python3 " + (dir / "oracle.py").string() + " " + familiar.string() +
                    " " + deceptive.string();
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  char buf[256];
  while (pipe && fgets(buf, sizeof buf, pipe)) out += buf;
  if (pipe) pclose(pipe);
  return out;
}

TEST(EvaluatorTest, PerturbationCostMatchesPythonTokenizer) {
  auto dir = CorpusDir("seed") / "patterns";
  for (const auto& record : Seeds().patterns) {
    std::string oracle = PythonCostOracle(dir / (record.id + ".familiar.py"),
                                          dir / (record.id + ".deceptive.py"));
    std::size_t distance = 0, count = 0;
    ASSERT_EQ(std::sscanf(oracle.c_str(), "%zu %zu", &distance, &count), 2) << oracle;
    EXPECT_EQ(TokenEditDistance(Language::kPython, record.familiar.source,
                                record.deceptive.source),
              distance)
        << record.id;
    EXPECT_DOUBLE_EQ(PerturbationCost(record), static_cast<double>(distance) / count)
        << record.id;
  }
  // >= becomes >: a single token substitution.
  const auto& lswr = Seeds().Pattern("lswr");
  EXPECT_EQ(TokenEditDistance(Language::kPython, lswr.familiar.source, lswr.deceptive.source),
            1u);
}

TEST(EvaluatorTest, RandomizedIdentifiersKeepTheBiasedOutcome) {
  std::vector<EvalSample> samples;
  for (const auto& record : Seeds().patterns) samples.push_back(Sample("luhn", record.id));
  for (std::uint64_t seed : {1u, 7u, 42u}) {
    Harness h({Scripted("bias", {{"behavior", "bias"}})});
    h.config.n_trials = 2;
    EvaluationReport r = AblationRandomizedIdentifiers(h.ctx, "bias", samples, h.config, seed);
    EXPECT_EQ(r.layout, ReportLayout::kAblation);
    for (const auto& a : Aggregates(r)) {
      double expected = a.condition == Condition::kAttack ? 0.0 : 1.0;
      EXPECT_DOUBLE_EQ(a.macro, expected) << a.arm << " " << ConditionName(a.condition);
    }
    EXPECT_NE(ReportText(r).find("randomized"), std::string::npos);
  }
}

TEST(EvaluatorTest, RandomizedIdentifiersKeepFaithfulCorrect) {
  Harness h({Scripted("faithful", {{"behavior", "faithful"}})});
  h.config.n_trials = 1;
  EvaluationReport r = AblationRandomizedIdentifiers(
      h.ctx, "faithful", {Sample("roman", "vowel"), Sample("luhn", "fastpow")}, h.config, 5);
  ASSERT_EQ(Aggregates(r).size(), 6u);
  for (const auto& a : Aggregates(r)) EXPECT_DOUBLE_EQ(a.macro, 1.0);
}

TEST(EvaluatorTest, UniversalityLayoutCoversEveryLanguage) {
  std::vector<EvalSample> samples = {Sample("luhn", "lswr")};
  for (const char* target : {"c_luhn", "rs_luhn", "go_luhn"}) {
    const auto& x = Universality().Target(target);
    std::string suffix = x.unit.language == Language::kC      ? "c"
                         : x.unit.language == Language::kRust ? "rust"
                                                              : "go";
    if (!Oracle().HasToolchain(x.unit.language)) GTEST_SKIP() << "no toolchain for " << suffix;
    samples.push_back({x, Universality().Pattern("lswr-" + suffix),
                       DefaultBehavior(x.unit.language, Strategy::kInjectPhantom),
                       Strategy::kInjectPhantom});
  }
  Harness h({Scripted("bias", {{"behavior", "bias"}}),
             Scripted("faithful", {{"behavior", "faithful"}})});
  h.config.n_trials = 1;
  h.config.jobs = 4;
  EvaluationReport r = RunEvaluation(h.ctx, h.config, samples);
  EXPECT_EQ(r.layout, ReportLayout::kUniversality);
  auto aggs = Aggregates(r);
  ASSERT_EQ(aggs.size(), 2u * 4u * 3u);
  for (const auto& a : aggs) {
    bool fooled = a.provider_id == "bias" && a.condition == Condition::kAttack;
    EXPECT_DOUBLE_EQ(a.macro, fooled ? 0.0 : 1.0)
        << a.provider_id << " " << LanguageName(a.language);
  }
  std::string text = ReportText(r);
  for (const char* lang : {"python", "c", "rust", "go"}) {
    EXPECT_NE(text.find(lang), std::string::npos) << lang;
  }
  EXPECT_NE(text.find("Overall"), std::string::npos);
}

TEST(EvaluatorTest, BaselineFilterDropsTargetsTheProviderCannotRead) {
  const auto& luhn = Seeds().Target("luhn");
  // The provider only ever answers luhn's output, so every other target has
  // a clean rate of zero.
  Harness h({Scripted("s", Schedule("predict", {luhn.expected_output}))});
  h.config.n_trials = 2;
  h.config.conditions = {Condition::kClean};
  EvaluationReport r =
      RunEvaluation(h.ctx, h.config, {Sample("luhn", "lswr"), Sample("roman", "lswr")});
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0].sample_id, "luhn+lswr");
  ASSERT_EQ(r.dropped["s"].size(), 1u);
  EXPECT_EQ(r.dropped["s"][0].first, "roman");
}

TEST(EvaluatorTest, RiskRowsCombineRiskAndCost) {
  Harness h({Scripted("bias", {{"behavior", "bias"}})});
  h.config.n_trials = 2;
  h.config.lambda_weight = 0.5;
  CampaignOptions options;
  options.compute_risk = true;
  EvaluationReport r = RunEvaluation(h.ctx, h.config, {Sample("luhn", "lswr")}, options);
  ASSERT_EQ(r.risks.size(), 1u);
  EXPECT_DOUBLE_EQ(r.risks[0].risk, 1.0);
  double cost = PerturbationCost(Seeds().Pattern("lswr"));
  EXPECT_DOUBLE_EQ(r.risks[0].cost, cost);
  EXPECT_DOUBLE_EQ(r.risks[0].objective, 1.0 + 0.5 * cost);
}

TEST(EvaluatorTest, CachedReplayIsByteIdentical) {
  auto cache = ScratchDir("eval-cache");
  auto first_dir = ScratchDir("eval-first");
  auto second_dir = ScratchDir("eval-second");
  std::vector<EvalSample> samples = {Sample("luhn", "lswr"), Sample("roman", "vowel")};
  {
    Harness h({Scripted("bias", {{"behavior", "bias"}})}, cache);
    h.config.n_trials = 2;
    RenderReport(RunEvaluation(h.ctx, h.config, samples), first_dir);
    EXPECT_GT(h.gateway->TotalUsage().backend_calls, 0);
  }
  Harness h({Scripted("bias", {{"behavior", "bias"}})}, cache);
  h.config.n_trials = 2;
  h.config.jobs = 3;
  auto paths = RenderReport(RunEvaluation(h.ctx, h.config, samples), second_dir);
  EXPECT_EQ(h.gateway->TotalUsage().backend_calls, 0);
  EXPECT_GT(h.gateway->TotalUsage().cache_hits, 0);
  for (const auto& p : paths) {
    EXPECT_EQ(ReadFile(p), ReadFile(first_dir / p.filename())) << p.filename();
  }
}

TEST(EvaluatorTest, AdaptiveRunDiffersOnlyByTheWarning) {
  Harness h({Scripted("bias", {{"behavior", "bias"}})});
  h.config.n_trials = 1;
  CampaignOptions options;
  options.adaptive = true;
  EvaluationReport r = RunEvaluation(h.ctx, h.config, {Sample("luhn", "lswr")}, options);
  EXPECT_EQ(r.layout, ReportLayout::kAdaptive);
  int robust = 0;
  for (const auto& c : r.cells) {
    if (c.prompt_mode != PromptMode::kRobust) continue;
    ++robust;
    EXPECT_DOUBLE_EQ(c.rate(), c.condition == Condition::kAttack ? 0.0 : 1.0);
  }
  EXPECT_EQ(robust, 3);
  auto programs = ComposeConditions(Sample("luhn", "lswr"), Oracle());
  const auto& prompts = h.gateway->prompts();
  for (const auto& [condition, unit] : programs) {
    auto plain = PredictionMessages(unit, PromptMode::kPlain, prompts);
    auto robust_msgs = PredictionMessages(unit, PromptMode::kRobust, prompts);
    ASSERT_EQ(robust_msgs.size(), plain.size() + 1);
    EXPECT_EQ(robust_msgs[0].content, prompts.Get("robust_warning"));
    EXPECT_EQ(MessagesHash({robust_msgs.begin() + 1, robust_msgs.end()}), MessagesHash(plain));
  }
  std::string text = ReportText(r);
  EXPECT_NE(text.find("Robust"), std::string::npos);
  EXPECT_NE(text.find("Original"), std::string::npos);
}

TEST(EvaluatorTest, CellsAreSortedWhateverTheJobCount) {
  std::vector<EvalSample> samples = {Sample("roman", "vowel"), Sample("luhn", "lswr"),
                                     Sample("caesar", "fastpow")};
  std::string reference;
  for (int jobs : {1, 4}) {
    Harness h({Scripted("faithful", {{"behavior", "faithful"}}),
               Scripted("bias", {{"behavior", "bias"}})});
    h.config.n_trials = 1;
    h.config.jobs = jobs;
    std::string csv = ReportCsv(RunEvaluation(h.ctx, h.config, samples));
    if (reference.empty()) reference = csv;
    EXPECT_EQ(csv, reference);
  }
}

TEST(EvaluatorTest, EmptyReportStillRenders) {
  EvaluationReport r;
  auto dir = ScratchDir("eval-empty");
  auto paths = RenderReport(r, dir);
  EXPECT_EQ(paths.size(), 4u);
  EXPECT_EQ(ReadFile(dir / "report.csv"),
            "provider,language,prompt_mode,arm,condition,sample,correct,n,rate\n");
  EXPECT_NE(ReadFile(dir / "report.txt").find("No cells"), std::string::npos);
}

}  // namespace
}  // namespace fpa
