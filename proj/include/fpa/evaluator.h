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

#ifndef FPA_EVALUATOR_H_
#define FPA_EVALUATOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpa/corpus.h"
#include "fpa/exec_oracle.h"
#include "fpa/injector.h"
#include "fpa/llm_gateway.h"

namespace fpa {

// clean: x, control: x with the unperturbed pattern, attack: x'.
enum class Condition { kClean, kControl, kAttack };

std::string_view ConditionName(Condition condition);
Condition ParseCondition(std::string_view name);
const std::vector<Condition>& AllConditions();

struct EvaluationConfig {
  int n_trials = 10;
  double baseline_threshold = 0.65;
  std::vector<ProviderConfig> providers;
  std::vector<Condition> conditions = AllConditions();
  PromptMode prompt_mode = PromptMode::kPlain;
  double lambda_weight = 1.0;
  Strategy strategy = Strategy::kInjectPhantom;
  // Concurrent (provider, sample) evaluations.
  int jobs = 1;
};

// Throws UsageError for n_trials < 1, a threshold outside [0, 1], an empty
// or duplicated condition list, or a control strategy.
void CheckConfig(const EvaluationConfig& config);

struct EvalContext {
  LlmGateway* gateway = nullptr;
  const ExecOracle* oracle = nullptr;
  ExecLimits limits;
};

// correct / n for one (provider, unit) pair.
struct RateResult {
  std::string provider_id;
  std::string sample_id;
  Language language = Language::kPython;
  Condition condition = Condition::kClean;
  PromptMode prompt_mode = PromptMode::kPlain;
  std::string arm = "original";  // ablation arm
  std::string truth;
  int correct = 0;
  int n = 0;
  std::vector<TrialRecord> trials;

  double rate() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
};

// Exactly config.n_trials predictions tagged "trial=i". Truth is recomputed
// by the oracle; unparseable trials count as incorrect. A provider error
// discards the partial run and propagates.
RateResult SuccessRate(const EvalContext& ctx, const std::string& provider_id,
                       const CodeUnit& unit, const EvaluationConfig& config,
                       const std::string& sample_id = {});

// One target with one pattern, composed for all three conditions.
struct EvalSample {
  TargetProgram target;
  DeceptionPatternRecord pattern;
  TargetBehavior behavior;
  Strategy strategy = Strategy::kInjectPhantom;

  std::string id() const { return target.id + "+" + pattern.id; }
};

// Every target paired with every pattern of its language, default t.
std::vector<EvalSample> PairSamples(const std::vector<TargetProgram>& targets,
                                    const std::vector<DeceptionPatternRecord>& patterns,
                                    Strategy strategy);

// The three programs for a sample. Throws ValidationError when the attack
// or control composition fails its runtime conditions.
std::map<Condition, CodeUnit> ComposeConditions(const EvalSample& sample,
                                                const ExecOracle& oracle,
                                                const ExecLimits& limits = {});

// Rates for config.conditions, each against that program's own output.
std::vector<RateResult> EvaluateConditions(const EvalContext& ctx,
                                           const std::string& provider_id,
                                           const EvalSample& sample,
                                           const EvaluationConfig& config);

struct BaselineFilter {
  std::vector<std::string> retained;
  // Dropped ids with their clean rates.
  std::vector<std::pair<std::string, double>> dropped;
};

// Keeps ids whose rate is at least `threshold`.
BaselineFilter FilterByRates(const std::vector<std::pair<std::string, double>>& rates,
                             double threshold);

BaselineFilter FilterBaseline(const EvalContext& ctx, const std::string& provider_id,
                              const std::vector<TargetProgram>& targets,
                              const EvaluationConfig& config);

struct RiskResult {
  int divergent = 0;
  int n = 0;
  double rate() const { return n == 0 ? 0.0 : static_cast<double>(divergent) / n; }
};

// Fraction of paired trials whose predictions for x and x' differ. A trial
// with an unparseable prediction counts as divergent.
RiskResult AdversarialRisk(const EvalContext& ctx, const std::string& provider_id,
                           const CodeUnit& x, const CodeUnit& x_prime,
                           const EvaluationConfig& config);

// Token edit distance between familiar and deceptive sources divided by the
// familiar token count.
double PerturbationCost(const DeceptionPatternRecord& record);

// Token-level Levenshtein distance (tokens compared by kind and text).
std::size_t TokenEditDistance(Language language, std::string_view a, std::string_view b);

struct Aggregate {
  std::string provider_id;
  Language language = Language::kPython;
  PromptMode prompt_mode = PromptMode::kPlain;
  std::string arm;
  Condition condition = Condition::kClean;
  int samples = 0;
  int correct = 0;
  int trials = 0;
  double macro = 0.0;  // mean of per-sample rates
  double micro = 0.0;  // pooled correct / pooled trials
};

struct RiskRow {
  std::string provider_id;
  std::string sample_id;
  double risk = 0.0;
  double cost = 0.0;
  double objective = 0.0;  // risk + lambda * cost
};

enum class ReportLayout { kConditions, kUniversality, kAdaptive, kAblation };

std::string_view ReportLayoutName(ReportLayout layout);

struct EvaluationReport {
  ReportLayout layout = ReportLayout::kConditions;
  std::vector<Condition> conditions = AllConditions();
  std::vector<RateResult> cells;
  std::vector<RiskRow> risks;
  // provider id -> dropped targets with their clean rates.
  std::map<std::string, std::vector<std::pair<std::string, double>>> dropped;
  // Stable run description: config, template hashes, provider settings,
  // toolchain versions. Volatile facts (time, cache hits) are kept out.
  nlohmann::json manifest = nlohmann::json::object();
};

// Groups cells by (provider, language, mode, arm, condition), sorted.
std::vector<Aggregate> Aggregates(const EvaluationReport& report);

struct CampaignOptions {
  bool compute_risk = false;
  // Also run the robust prompt (adaptive layout).
  bool adaptive = false;
  // Add an identifier-randomized arm with this seed.
  std::optional<std::uint64_t> ablation_seed;
};

// Baseline filter per provider, then every retained sample under every
// provider. Cells are sorted by (provider, language, mode, arm, condition,
// sample) whatever the completion order.
EvaluationReport RunEvaluation(const EvalContext& ctx, const EvaluationConfig& config,
                               const std::vector<EvalSample>& samples,
                               const CampaignOptions& options = {});

// Rows are providers, columns conditions; one cell per (provider, sample,
// condition).
EvaluationReport TransferabilityMatrix(const EvalContext& ctx,
                                       const std::string& generating_provider_tag,
                                       const std::vector<std::string>& providers,
                                       const std::vector<EvalSample>& samples,
                                       const EvaluationConfig& config);

// Identifier-randomized compositions next to the originals. Throws
// ValidationError if renaming changes any program's output.
EvaluationReport AblationRandomizedIdentifiers(const EvalContext& ctx,
                                               const std::string& provider_id,
                                               const std::vector<EvalSample>& samples,
                                               const EvaluationConfig& config,
                                               std::uint64_t seed);

// report.csv (one row per cell), aggregates.csv, report.txt (tables in the
// layout's shape) and report.json (manifest plus cells and trials). Returns
// the written paths.
std::vector<std::filesystem::path> RenderReport(const EvaluationReport& report,
                                                const std::filesystem::path& dir);

std::string ReportCsv(const EvaluationReport& report);
std::string AggregatesCsv(const EvaluationReport& report);
std::string ReportText(const EvaluationReport& report);

}  // namespace fpa

#endif  // FPA_EVALUATOR_H_
