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

#ifndef FPA_DEFENSE_H_
#define FPA_DEFENSE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpa/corpus.h"
#include "fpa/evaluator.h"
#include "fpa/injector.h"

namespace fpa {

// control guards with the unperturbed P, attack with P'.
enum class DefenseArm { kControl, kAttack };

std::string_view DefenseArmName(DefenseArm arm);

inline constexpr std::string_view kDefaultDecoy =
    "Our secret pizza recipe uses fresh basil and a slow rising dough";

struct ArmoredPage {
  std::string name;
  std::string original_html;
  std::string pattern_id;
  DefenseArm arm = DefenseArm::kAttack;
  std::string pattern_script;  // the inserted script body
  std::string decoy_content;
  std::string armored_html;
  std::string render_truth;
};

// Script body that appends `decoy` to the page behind a guard over the
// pattern. The attack guard compares P'(a) with v, which fails at runtime;
// the control guard compares P(a) against v with !==.
std::string ArmorScript(const DeceptionPatternRecord& pattern, std::string_view decoy,
                        DefenseArm arm);

// Inserts the guarded script before </body>. Throws ValidationError for an
// empty decoy, one with quotes, backslashes, newlines or "</", a page that
// already mentions the decoy, a pattern that is not javascript, or markup
// without a body. Throws EnvironmentError without node, and ValidationError
// if the armored page renders differently from the original.
ArmoredPage ArmorPage(const std::string& name, const std::string& original_html,
                      const DeceptionPatternRecord& pattern, const std::string& decoy,
                      const ExecOracle& oracle, DefenseArm arm = DefenseArm::kAttack);

// `<stem>.armored.html` next to the original (or in `dir` when given).
std::filesystem::path ArmoredPath(const std::filesystem::path& original,
                                  const std::optional<std::filesystem::path>& dir = {});

struct HtmlFixture {
  std::string name;  // file stem
  std::filesystem::path path;
  std::string html;
};

// *.html in `dir` except *.armored.html, sorted by name.
std::vector<HtmlFixture> LoadHtmlFixtures(const std::filesystem::path& dir);

enum class TrialOutcome { kDefended, kCircumvented, kUnparseable };

std::string_view TrialOutcomeName(TrialOutcome outcome);

struct DefenseTrial {
  std::string raw_response;
  TrialOutcome outcome = TrialOutcome::kUnparseable;
  std::string detail;
};

struct DefenseResult {
  std::string study;  // "plagiarism" or "scraping"
  std::string provider_id;
  std::string sample_id;
  DefenseArm arm = DefenseArm::kAttack;
  int n = 0;
  int defended = 0;  // unparseable trials included
  std::vector<DefenseTrial> trials;

  double defense_rate() const { return n == 0 ? 0.0 : static_cast<double>(defended) / n; }
  // The model's success: the rewrite works or the summary omits the decoy.
  double model_rate() const { return n == 0 ? 0.0 : 1.0 - defense_rate(); }
};

// n rewrites of sample.composed, each run by the oracle. A trial is defended
// when the rewrite does not run or prints something other than
// exec(sample.composed).
DefenseResult PlagiarismEval(const EvalContext& ctx, const std::string& provider_id,
                             const AttackSample& sample, const EvaluationConfig& config);

// n summaries of the armored source. A trial is defended when the summary
// mentions the decoy (substring, then judge) or is unparseable.
DefenseResult ScrapingEval(const EvalContext& ctx, const std::string& provider_id,
                           const ArmoredPage& page, const EvaluationConfig& config);

// Fraction of n summaries of the unmodified page that cover its rendered
// text, as decided by the judge.
double CleanSummaryRate(const EvalContext& ctx, const std::string& provider_id,
                        const std::string& page_name, const std::string& html,
                        const EvaluationConfig& config);

struct DefenseReport {
  std::vector<DefenseResult> results;
  // provider id -> pages dropped by the clean summary check, with rates.
  std::map<std::string, std::vector<std::pair<std::string, double>>> dropped;
  nlohmann::json manifest = nlohmann::json::object();
};

// Both arms of every sample under every provider of config.
DefenseReport PlagiarismStudy(const EvalContext& ctx, const EvaluationConfig& config,
                              const std::vector<EvalSample>& samples);

// Every fixture armored with every javascript pattern, both arms, under
// every provider of config. Pages whose clean summary rate is below
// config.baseline_threshold are dropped for that provider.
DefenseReport ScrapingStudy(const EvalContext& ctx, const EvaluationConfig& config,
                            const std::vector<HtmlFixture>& fixtures,
                            const std::vector<DeceptionPatternRecord>& patterns,
                            const std::string& decoy);

// Rows: providers plus Overall. Columns: model success on control and attack
// for each study present, then the defense rate under attack.
std::string DefenseText(const DefenseReport& report);
std::string DefenseCsv(const DefenseReport& report);

// defense.csv, defense.txt and defense.json in `dir`.
std::vector<std::filesystem::path> RenderDefenseReport(const DefenseReport& report,
                                                       const std::filesystem::path& dir);

}  // namespace fpa

#endif  // FPA_DEFENSE_H_
