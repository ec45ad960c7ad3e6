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

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "fpa/errors.h"
#include "fpa/lexer.h"
#include "fpa/parallel.h"
#include "fpa/renamer.h"
#include "fpa/text_util.h"

namespace fpa {

using nlohmann::json;

std::string_view ConditionName(Condition condition) {
  switch (condition) {
    case Condition::kClean: return "clean";
    case Condition::kControl: return "control";
    case Condition::kAttack: return "attack";
  }
  return "?";
}

Condition ParseCondition(std::string_view name) {
  for (Condition c : AllConditions()) {
    if (ConditionName(c) == name) return c;
  }
  throw UsageError("unknown condition '" + std::string(name) +
                   "' (expected clean, control or attack)");
}

const std::vector<Condition>& AllConditions() {
  static const std::vector<Condition> all = {Condition::kClean, Condition::kControl,
                                             Condition::kAttack};
  return all;
}

std::string_view ReportLayoutName(ReportLayout layout) {
  switch (layout) {
    case ReportLayout::kConditions: return "conditions";
    case ReportLayout::kUniversality: return "universality";
    case ReportLayout::kAdaptive: return "adaptive";
    case ReportLayout::kAblation: return "ablation";
  }
  return "?";
}

void CheckConfig(const EvaluationConfig& config) {
  if (config.n_trials < 1) throw UsageError("n_trials must be at least 1");
  if (!(config.baseline_threshold >= 0.0 && config.baseline_threshold <= 1.0)) {
    throw UsageError("baseline_threshold must lie in [0, 1]");
  }
  if (config.conditions.empty()) throw UsageError("at least one condition is required");
  std::set<Condition> seen(config.conditions.begin(), config.conditions.end());
  if (seen.size() != config.conditions.size()) throw UsageError("conditions repeat");
  if (config.strategy == Strategy::kControl) {
    throw UsageError("strategy must be inject_phantom or hide_logic");
  }
  if (config.jobs < 1) throw UsageError("jobs must be at least 1");
}

RateResult SuccessRate(const EvalContext& ctx, const std::string& provider_id,
                       const CodeUnit& unit, const EvaluationConfig& config,
                       const std::string& sample_id) {
  if (config.n_trials < 1) throw UsageError("n_trials must be at least 1");
  ExecResult truth = ctx.oracle->ExecuteMemoized(unit, ctx.limits);
  if (!truth.ok()) {
    throw ValidationError("sample '" + sample_id + "' does not run: " + truth.Describe());
  }
  RateResult r;
  r.provider_id = provider_id;
  r.sample_id = sample_id;
  r.language = unit.language;
  r.prompt_mode = config.prompt_mode;
  r.truth = truth.stdout_normalized;
  r.n = config.n_trials;
  for (int i = 0; i < config.n_trials; ++i) {
    TrialRecord t = PredictOutput(*ctx.gateway, provider_id, unit, config.prompt_mode,
                                  "trial=" + std::to_string(i));
    t.matched_truth = t.parsed && t.extracted_answer == r.truth;
    if (*t.matched_truth) ++r.correct;
    r.trials.push_back(std::move(t));
  }
  return r;
}

std::vector<EvalSample> PairSamples(const std::vector<TargetProgram>& targets,
                                    const std::vector<DeceptionPatternRecord>& patterns,
                                    Strategy strategy) {
  std::vector<EvalSample> out;
  for (const auto& x : targets) {
    for (const auto& p : patterns) {
      if (p.language() != x.unit.language) continue;
      out.push_back({x, p, DefaultBehavior(x.unit.language, strategy), strategy});
    }
  }
  return out;
}

std::map<Condition, CodeUnit> ComposeConditions(const EvalSample& sample,
                                                const ExecOracle& oracle,
                                                const ExecLimits& limits) {
  std::map<Condition, CodeUnit> out;
  out[Condition::kClean] = sample.target.unit;
  for (auto [condition, strategy] :
       {std::pair{Condition::kControl, Strategy::kControl},
        std::pair{Condition::kAttack, sample.strategy}}) {
    TargetBehavior behavior = strategy == Strategy::kControl
                                  ? DefaultBehavior(sample.target.unit.language, strategy)
                                  : sample.behavior;
    AttackSample composed =
        ComposeAttack(sample.target, sample.pattern, strategy, behavior, oracle);
    RuntimeCheck check = CheckRuntime(composed, oracle, limits);
    if (!check.ok()) {
      throw ValidationError("sample '" + sample.id() + "' (" +
                            std::string(ConditionName(condition)) + "): " +
                            Join(check.diagnostics, "; "));
    }
    out[condition] = composed.composed;
  }
  return out;
}

std::vector<RateResult> EvaluateConditions(const EvalContext& ctx,
                                           const std::string& provider_id,
                                           const EvalSample& sample,
                                           const EvaluationConfig& config) {
  auto programs = ComposeConditions(sample, *ctx.oracle, ctx.limits);
  std::vector<RateResult> out;
  for (Condition c : config.conditions) {
    RateResult r = SuccessRate(ctx, provider_id, programs.at(c), config, sample.id());
    r.condition = c;
    out.push_back(std::move(r));
  }
  return out;
}

BaselineFilter FilterByRates(const std::vector<std::pair<std::string, double>>& rates,
                             double threshold) {
  BaselineFilter f;
  for (const auto& [id, rate] : rates) {
    if (rate >= threshold) {
      f.retained.push_back(id);
    } else {
      f.dropped.emplace_back(id, rate);
    }
  }
  return f;
}

BaselineFilter FilterBaseline(const EvalContext& ctx, const std::string& provider_id,
                              const std::vector<TargetProgram>& targets,
                              const EvaluationConfig& config) {
  std::vector<std::pair<std::string, double>> rates;
  for (const auto& x : targets) {
    rates.emplace_back(x.id, SuccessRate(ctx, provider_id, x.unit, config, x.id).rate());
  }
  return FilterByRates(rates, config.baseline_threshold);
}

RiskResult AdversarialRisk(const EvalContext& ctx, const std::string& provider_id,
                           const CodeUnit& x, const CodeUnit& x_prime,
                           const EvaluationConfig& config) {
  RiskResult r;
  r.n = config.n_trials;
  for (int i = 0; i < config.n_trials; ++i) {
    const std::string tag = "trial=" + std::to_string(i);
    TrialRecord a = PredictOutput(*ctx.gateway, provider_id, x, config.prompt_mode, tag);
    TrialRecord b = PredictOutput(*ctx.gateway, provider_id, x_prime, config.prompt_mode, tag);
    bool same = a.parsed && b.parsed && JudgeEqual(a.extracted_answer, b.extracted_answer);
    if (!same) ++r.divergent;
  }
  return r;
}

std::size_t TokenEditDistance(Language language, std::string_view a, std::string_view b) {
  auto ta = SignificantTokens(language, a);
  auto tb = SignificantTokens(language, b);
  std::vector<std::size_t> prev(tb.size() + 1), cur(tb.size() + 1);
  for (std::size_t j = 0; j <= tb.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ta.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= tb.size(); ++j) {
      bool same = ta[i - 1].kind == tb[j - 1].kind && ta[i - 1].text == tb[j - 1].text;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (same ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[tb.size()];
}

double PerturbationCost(const DeceptionPatternRecord& record) {
  Language lang = record.language();
  std::size_t n = SignificantTokens(lang, record.familiar.source).size();
  if (n == 0) throw ValidationError("record '" + record.id + "' has an empty familiar source");
  return static_cast<double>(
             TokenEditDistance(lang, record.familiar.source, record.deceptive.source)) /
         static_cast<double>(n);
}

namespace {

int LanguageOrder(Language l) {
  switch (l) {
    case Language::kPython: return 0;
    case Language::kC: return 1;
    case Language::kRust: return 2;
    case Language::kGo: return 3;
    case Language::kJavaScript: return 4;
    case Language::kHtml: return 5;
  }
  return 6;
}

auto CellKey(const RateResult& r) {
  return std::make_tuple(r.provider_id, LanguageOrder(r.language), static_cast<int>(r.prompt_mode),
                         r.arm, static_cast<int>(r.condition), r.sample_id);
}

void SortCells(std::vector<RateResult>& cells) {
  std::stable_sort(cells.begin(), cells.end(),
                   [](const RateResult& a, const RateResult& b) { return CellKey(a) < CellKey(b); });
}

json ConfigJson(const EvaluationConfig& config) {
  json conditions = json::array();
  for (Condition c : config.conditions) conditions.push_back(ConditionName(c));
  return {{"n_trials", config.n_trials},
          {"baseline_threshold", config.baseline_threshold},
          {"conditions", conditions},
          {"prompt_mode", PromptModeName(config.prompt_mode)},
          {"lambda", config.lambda_weight},
          {"strategy", StrategyName(config.strategy)}};
}

json BaseManifest(const EvalContext& ctx, const EvaluationConfig& config,
                  const std::vector<std::string>& providers,
                  const std::vector<EvalSample>& samples) {
  json m;
  m["config"] = ConfigJson(config);
  json p = json::array();
  for (const auto& id : providers) p.push_back(DescribeProvider(ctx.gateway->Provider(id)));
  m["providers"] = p;
  m["judge"] = ctx.gateway->JudgeId();
  m["prompt_templates"] = ctx.gateway->prompts().Hashes();
  std::set<Language> languages;
  json ids = json::array();
  for (const auto& s : samples) {
    languages.insert(s.target.unit.language);
    ids.push_back(s.id());
  }
  json tools = json::object();
  for (Language l : languages) {
    tools[std::string(LanguageName(l))] = ctx.oracle->ToolchainVersion(l);
  }
  m["toolchains"] = tools;
  m["samples"] = ids;
  return m;
}

std::vector<std::string> ProviderIdsOf(const EvaluationConfig& config) {
  std::vector<std::string> ids;
  for (const auto& p : config.providers) ids.push_back(p.id);
  return ids;
}

struct Task {
  std::string provider;
  PromptMode mode;
  std::string arm;
  const EvalSample* sample;
  std::optional<EvalSample> randomized;
};

// Randomized twin of `sample`; its compositions must match the originals.
EvalSample RandomizedSample(const EvalContext& ctx, const EvalSample& sample,
                            std::uint64_t seed) {
  EvalSample twin = sample;
  twin.pattern = RandomizeRecordIdentifiers(sample.pattern, seed);
  auto before = ComposeConditions(sample, *ctx.oracle, ctx.limits);
  auto after = ComposeConditions(twin, *ctx.oracle, ctx.limits);
  for (const auto& [condition, unit] : before) {
    ExecResult a = ctx.oracle->ExecuteMemoized(unit, ctx.limits);
    ExecResult b = ctx.oracle->ExecuteMemoized(after.at(condition), ctx.limits);
    if (!a.ok() || !b.ok() || a.stdout_normalized != b.stdout_normalized) {
      throw ValidationError("identifier randomization changed the " +
                            std::string(ConditionName(condition)) + " output of '" +
                            sample.id() + "'");
    }
  }
  return twin;
}

EvaluationReport Campaign(const EvalContext& ctx, const EvaluationConfig& config,
                          const std::vector<std::string>& providers,
                          const std::vector<EvalSample>& samples,
                          const CampaignOptions& options, bool filter) {
  CheckConfig(config);
  EvaluationReport report;
  report.conditions = config.conditions;
  report.manifest = BaseManifest(ctx, config, providers, samples);

  std::vector<PromptMode> modes = {config.prompt_mode};
  if (options.adaptive) modes = {PromptMode::kPlain, PromptMode::kRobust};

  // Baseline filter on distinct targets, per provider.
  std::map<std::string, std::set<std::string>> retained;
  if (filter) {
    std::vector<TargetProgram> targets;
    std::set<std::string> seen;
    for (const auto& s : samples) {
      if (seen.insert(s.target.id).second) targets.push_back(s.target);
    }
    std::vector<BaselineFilter> filters(providers.size());
    ParallelFor(static_cast<int>(providers.size()), config.jobs, [&](int i) {
      EvaluationConfig base = config;
      base.prompt_mode = PromptMode::kPlain;
      filters[i] = FilterBaseline(ctx, providers[i], targets, base);
    });
    for (std::size_t i = 0; i < providers.size(); ++i) {
      retained[providers[i]].insert(filters[i].retained.begin(), filters[i].retained.end());
      report.dropped[providers[i]] = filters[i].dropped;
    }
  }

  std::vector<Task> tasks;
  for (const auto& provider : providers) {
    for (const auto& sample : samples) {
      if (filter && !retained[provider].count(sample.target.id)) continue;
      for (PromptMode mode : modes) {
        tasks.push_back({provider, mode, "original", &sample, std::nullopt});
        if (options.ablation_seed) {
          tasks.push_back({provider, mode, "randomized", &sample,
                           RandomizedSample(ctx, sample, *options.ablation_seed)});
        }
      }
    }
  }

  std::vector<std::vector<RateResult>> results(tasks.size());
  std::vector<std::optional<RiskRow>> risks(tasks.size());
  ParallelFor(static_cast<int>(tasks.size()), config.jobs, [&](int i) {
    const Task& task = tasks[i];
    const EvalSample& sample = task.randomized ? *task.randomized : *task.sample;
    EvaluationConfig cfg = config;
    cfg.prompt_mode = task.mode;
    results[i] = EvaluateConditions(ctx, task.provider, sample, cfg);
    for (auto& r : results[i]) {
      r.sample_id = task.sample->id();
      r.arm = task.arm;
    }
    if (options.compute_risk && task.arm == "original" && task.mode == config.prompt_mode) {
      auto programs = ComposeConditions(sample, *ctx.oracle, ctx.limits);
      RiskRow row;
      row.provider_id = task.provider;
      row.sample_id = sample.id();
      row.risk = AdversarialRisk(ctx, task.provider, programs.at(Condition::kClean),
                                 programs.at(Condition::kAttack), cfg)
                     .rate();
      row.cost = PerturbationCost(sample.pattern);
      row.objective = row.risk + config.lambda_weight * row.cost;
      risks[i] = row;
    }
  });
  for (auto& rs : results) {
    for (auto& r : rs) report.cells.push_back(std::move(r));
  }
  for (auto& r : risks) {
    if (r) report.risks.push_back(*r);
  }
  SortCells(report.cells);
  std::stable_sort(report.risks.begin(), report.risks.end(), [](const auto& a, const auto& b) {
    return std::tie(a.provider_id, a.sample_id) < std::tie(b.provider_id, b.sample_id);
  });

  std::set<Language> languages;
  for (const auto& s : samples) languages.insert(s.target.unit.language);
  if (options.ablation_seed) {
    report.layout = ReportLayout::kAblation;
    report.manifest["ablation_seed"] = *options.ablation_seed;
  } else if (options.adaptive) {
    report.layout = ReportLayout::kAdaptive;
  } else if (languages.size() > 1) {
    report.layout = ReportLayout::kUniversality;
  }
  report.manifest["layout"] = ReportLayoutName(report.layout);
  return report;
}

}  // namespace

EvaluationReport RunEvaluation(const EvalContext& ctx, const EvaluationConfig& config,
                               const std::vector<EvalSample>& samples,
                               const CampaignOptions& options) {
  return Campaign(ctx, config, ProviderIdsOf(config), samples, options, true);
}

EvaluationReport TransferabilityMatrix(const EvalContext& ctx,
                                       const std::string& generating_provider_tag,
                                       const std::vector<std::string>& providers,
                                       const std::vector<EvalSample>& samples,
                                       const EvaluationConfig& config) {
  EvaluationConfig cfg = config;
  cfg.conditions = AllConditions();
  EvaluationReport r = Campaign(ctx, cfg, providers, samples, {}, false);
  r.manifest["generating_provider"] = generating_provider_tag;
  return r;
}

EvaluationReport AblationRandomizedIdentifiers(const EvalContext& ctx,
                                               const std::string& provider_id,
                                               const std::vector<EvalSample>& samples,
                                               const EvaluationConfig& config,
                                               std::uint64_t seed) {
  CampaignOptions options;
  options.ablation_seed = seed;
  return Campaign(ctx, config, {provider_id}, samples, options, false);
}

std::vector<Aggregate> Aggregates(const EvaluationReport& report) {
  std::vector<Aggregate> out;
  for (const auto& cell : report.cells) {
    bool same_group = !out.empty() && out.back().provider_id == cell.provider_id &&
                      out.back().language == cell.language &&
                      out.back().prompt_mode == cell.prompt_mode &&
                      out.back().arm == cell.arm && out.back().condition == cell.condition;
    if (!same_group) {
      Aggregate a;
      a.provider_id = cell.provider_id;
      a.language = cell.language;
      a.prompt_mode = cell.prompt_mode;
      a.arm = cell.arm;
      a.condition = cell.condition;
      out.push_back(a);
    }
    Aggregate& a = out.back();
    a.samples++;
    a.correct += cell.correct;
    a.trials += cell.n;
    a.macro += cell.rate();
  }
  for (auto& a : out) {
    a.macro /= a.samples;
    a.micro = a.trials == 0 ? 0.0 : static_cast<double>(a.correct) / a.trials;
  }
  return out;
}

namespace {

std::string Fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Percent(double v) { return Fixed(100.0 * v, 1) + "%"; }

std::string ColumnLabel(Condition c) {
  switch (c) {
    case Condition::kClean: return "x";
    case Condition::kControl: return "x+P0";
    case Condition::kAttack: return "x+P'";
  }
  return "?";
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// Renders rows of cells with column widths fitted to the content.
std::string Table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += (i == 0 ? "" : "  ") + Pad(row[i], width[i]);
    }
    out += std::string(TrimRight(line)) + "\n";
  }
  return out;
}

const Aggregate* Find(const std::vector<Aggregate>& aggs, const std::string& provider,
                      Language lang, PromptMode mode, const std::string& arm, Condition c) {
  for (const auto& a : aggs) {
    if (a.provider_id == provider && a.language == lang && a.prompt_mode == mode &&
        a.arm == arm && a.condition == c) {
      return &a;
    }
  }
  return nullptr;
}

// Each column is (language, mode, arm, condition); rows are providers plus
// an Overall row averaging the provider values.
std::string MatrixText(const EvaluationReport& report, const std::vector<Aggregate>& aggs,
                       const std::vector<std::tuple<Language, PromptMode, std::string,
                                                    Condition, std::string>>& columns,
                       const std::vector<std::string>& group_header) {
  std::vector<std::string> providers;
  for (const auto& a : aggs) {
    if (std::find(providers.begin(), providers.end(), a.provider_id) == providers.end()) {
      providers.push_back(a.provider_id);
    }
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head1 = {"Model"};
  head1.insert(head1.end(), group_header.begin(), group_header.end());
  rows.push_back(head1);
  std::vector<std::string> head2 = {""};
  for (const auto& col : columns) head2.push_back(std::get<4>(col));
  rows.push_back(head2);
  std::vector<double> sum(columns.size(), 0.0);
  std::vector<int> count(columns.size(), 0);
  for (const auto& p : providers) {
    std::vector<std::string> row = {p};
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto& [lang, mode, arm, cond, label] = columns[i];
      const Aggregate* a = Find(aggs, p, lang, mode, arm, cond);
      if (label == "delta") {
        const Aggregate* o = Find(aggs, p, lang, mode, "original", cond);
        const Aggregate* r = Find(aggs, p, lang, mode, "randomized", cond);
        if (o && r) {
          double d = r->macro - o->macro;
          row.push_back((d >= 0 ? "+" : "") + Fixed(100.0 * d, 1));
          sum[i] += d;
          count[i]++;
        } else {
          row.push_back("-");
        }
        continue;
      }
      if (a) {
        row.push_back(Percent(a->macro));
        sum[i] += a->macro;
        count[i]++;
      } else {
        row.push_back("-");
      }
    }
    rows.push_back(row);
  }
  if (!providers.empty()) {
    std::vector<std::string> overall = {"Overall"};
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (count[i] == 0) {
        overall.push_back("-");
      } else if (std::get<4>(columns[i]) == "delta") {
        double d = sum[i] / count[i];
        overall.push_back((d >= 0 ? "+" : "") + Fixed(100.0 * d, 1));
      } else {
        overall.push_back(Percent(sum[i] / count[i]));
      }
    }
    rows.push_back(overall);
  }
  (void)report;
  return Table(rows);
}

std::vector<Language> LanguagesOf(const EvaluationReport& report) {
  std::set<std::pair<int, Language>> seen;
  for (const auto& c : report.cells) seen.insert({LanguageOrder(c.language), c.language});
  std::vector<Language> out;
  for (const auto& [order, l] : seen) out.push_back(l);
  return out;
}

std::string ReferenceText(ReportLayout layout) {
  switch (layout) {
    case ReportLayout::kConditions:
    case ReportLayout::kUniversality:
      return "Published reference, live APIs (not reproduced offline):\n"
             "  GPT-4o      python 90.8/93.5/8.9  c 73.6/74.6/21.7  rust 81.0/83.3/12.1  "
             "go 88.4/83.1/24.1\n"
             "  Claude-3.5  python 84.3/77.2/17.1  c 62.0/80.3/25.9  rust 80.6/78.4/9.2  "
             "go 84.2/78.6/14.6\n"
             "  Gemini-2.0  python 92.2/88.2/24.1  c 77.2/83.5/26.1  rust 71.6/75.1/36.4  "
             "go 82.8/75.3/26.7\n";
    case ReportLayout::kAdaptive:
      return "Published reference, live APIs (not reproduced offline), control and attack,\n"
             "original/robust:\n"
             "  GPT-4o      93.5/92.6  8.9/8.3\n"
             "  Claude-3.5  77.2/82.8  17.1/14.8\n"
             "  Gemini-2.0  88.2/90.9  24.1/27.0\n";
    case ReportLayout::kAblation:
      return "Published reference, live APIs: with randomized identifiers the attack\n"
             "success rate went from 11.7% to 18.9%.\n";
  }
  return {};
}

}  // namespace

std::string ReportCsv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "provider,language,prompt_mode,arm,condition,sample,correct,n,rate\n";
  for (const auto& c : report.cells) {
    out << c.provider_id << ',' << LanguageName(c.language) << ','
        << PromptModeName(c.prompt_mode) << ',' << c.arm << ',' << ConditionName(c.condition)
        << ',' << c.sample_id << ',' << c.correct << ',' << c.n << ',' << Fixed(c.rate())
        << '\n';
  }
  return out.str();
}

std::string AggregatesCsv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "provider,language,prompt_mode,arm,condition,samples,correct,trials,macro,micro\n";
  for (const auto& a : Aggregates(report)) {
    out << a.provider_id << ',' << LanguageName(a.language) << ','
        << PromptModeName(a.prompt_mode) << ',' << a.arm << ',' << ConditionName(a.condition)
        << ',' << a.samples << ',' << a.correct << ',' << a.trials << ',' << Fixed(a.macro)
        << ',' << Fixed(a.micro) << '\n';
  }
  return out.str();
}

std::string ReportText(const EvaluationReport& report) {
  std::ostringstream out;
  out << "FPA evaluation report (" << ReportLayoutName(report.layout) << ")\n";
  const json& m = report.manifest;
  if (m.contains("config")) {
    const json& c = m["config"];
    out << "n_trials=" << c.value("n_trials", 0)
        << " baseline_threshold=" << Fixed(c.value("baseline_threshold", 0.0), 2)
        << " prompt_mode=" << c.value("prompt_mode", "") << " strategy="
        << c.value("strategy", "") << " lambda=" << Fixed(c.value("lambda", 0.0), 2) << "\n";
  }
  if (m.contains("providers")) {
    for (const auto& p : m["providers"]) {
      std::string temp = p["temperature"].is_string() ? p["temperature"].get<std::string>()
                                                      : Fixed(p["temperature"].get<double>(), 2);
      out << "provider " << p.value("id", "") << ": " << p.value("kind", "") << " model="
          << p.value("model", "") << " temperature=" << temp << "\n";
    }
  }
  if (m.contains("prompt_templates")) {
    out << "templates:";
    for (const auto& [name, hash] : m["prompt_templates"].items()) {
      out << " " << name << "=" << hash.get<std::string>();
    }
    out << "\n";
  }
  if (m.contains("generating_provider")) {
    out << "patterns generated by: " << m["generating_provider"].get<std::string>() << "\n";
  }
  out << "Rates are macro averages over samples (aggregates.csv also gives micro).\n\n";

  auto aggs = Aggregates(report);
  if (report.cells.empty()) {
    out << "No cells.\n";
    return out.str();
  }
  std::vector<std::tuple<Language, PromptMode, std::string, Condition, std::string>> columns;
  std::vector<std::string> groups;
  PromptMode base_mode = report.cells.front().prompt_mode;
  if (m.contains("config")) base_mode = ParsePromptMode(m["config"].value("prompt_mode", "plain"));
  for (Language lang : LanguagesOf(report)) {
    std::string lname(LanguageName(lang));
    switch (report.layout) {
      case ReportLayout::kConditions:
      case ReportLayout::kUniversality:
        for (std::size_t i = 0; i < report.conditions.size(); ++i) {
          Condition c = report.conditions[i];
          columns.emplace_back(lang, base_mode, "original", c, ColumnLabel(c));
          groups.push_back(i == 0 ? lname : "");
        }
        break;
      case ReportLayout::kAdaptive:
        for (Condition c : report.conditions) {
          columns.emplace_back(lang, PromptMode::kPlain, "original", c,
                               ColumnLabel(c) + " Original");
          groups.push_back(lname);
          columns.emplace_back(lang, PromptMode::kRobust, "original", c,
                               ColumnLabel(c) + " Robust");
          groups.push_back("");
        }
        break;
      case ReportLayout::kAblation:
        for (Condition c : report.conditions) {
          columns.emplace_back(lang, base_mode, "original", c, ColumnLabel(c) + " original");
          groups.push_back(lname);
          columns.emplace_back(lang, base_mode, "randomized", c, ColumnLabel(c) + " randomized");
          groups.push_back("");
          columns.emplace_back(lang, base_mode, "randomized", c, "delta");
          groups.push_back("");
        }
        break;
    }
  }
  out << MatrixText(report, aggs, columns, groups);

  if (!report.risks.empty()) {
    out << "\nAdversarial risk and perturbation cost\n";
    std::vector<std::vector<std::string>> rows = {
        {"Provider", "Sample", "R_A", "C", "R_A + lambda*C"}};
    for (const auto& r : report.risks) {
      rows.push_back({r.provider_id, r.sample_id, Fixed(r.risk), Fixed(r.cost),
                      Fixed(r.objective)});
    }
    out << Table(rows);
  }
  bool any_dropped = false;
  for (const auto& [provider, list] : report.dropped) any_dropped |= !list.empty();
  if (any_dropped) {
    out << "\nDropped by the baseline filter\n";
    for (const auto& [provider, list] : report.dropped) {
      for (const auto& [id, rate] : list) {
        out << "  " << provider << " " << id << " " << Fixed(rate) << "\n";
      }
    }
  }
  out << "\n" << ReferenceText(report.layout);
  return out.str();
}

std::vector<std::filesystem::path> RenderReport(const EvaluationReport& report,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json cells = json::array();
  for (const auto& c : report.cells) {
    json trials = json::array();
    for (const auto& t : c.trials) trials.push_back(TrialToJson(t));
    cells.push_back({{"provider", c.provider_id},
                     {"language", LanguageName(c.language)},
                     {"prompt_mode", PromptModeName(c.prompt_mode)},
                     {"arm", c.arm},
                     {"condition", ConditionName(c.condition)},
                     {"sample", c.sample_id},
                     {"truth", c.truth},
                     {"correct", c.correct},
                     {"n", c.n},
                     {"trials", trials}});
  }
  json risks = json::array();
  for (const auto& r : report.risks) {
    risks.push_back({{"provider", r.provider_id}, {"sample", r.sample_id}, {"risk", r.risk},
                     {"cost", r.cost}, {"objective", r.objective}});
  }
  json dropped = json::object();
  for (const auto& [provider, list] : report.dropped) {
    json l = json::array();
    for (const auto& [id, rate] : list) l.push_back({{"target", id}, {"rate", rate}});
    dropped[provider] = l;
  }
  json doc = {{"manifest", report.manifest}, {"layout", ReportLayoutName(report.layout)},
              {"cells", cells}, {"risks", risks}, {"dropped", dropped}};
  std::vector<std::filesystem::path> paths = {dir / "report.csv", dir / "aggregates.csv",
                                              dir / "report.txt", dir / "report.json"};
  WriteFile(paths[0], ReportCsv(report));
  WriteFile(paths[1], AggregatesCsv(report));
  WriteFile(paths[2], ReportText(report));
  WriteFile(paths[3], doc.dump(2) + "\n");
  return paths;
}

}  // namespace fpa
