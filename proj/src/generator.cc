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

#include "fpa/generator.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <thread>

#include "fpa/errors.h"
#include "fpa/lexer.h"
#include "fpa/text_util.h"

namespace fpa {

std::string_view PatternStyleName(PatternStyle style) {
  return style == PatternStyle::kTextbook ? "textbook" : "real_world";
}

PatternStyle ParsePatternStyle(std::string_view name) {
  if (name == "textbook") return PatternStyle::kTextbook;
  if (name == "real_world") return PatternStyle::kRealWorld;
  throw UsageError("unknown pattern style '" + std::string(name) +
                   "' (expected textbook or real_world)");
}

SearchBudget MiningBudget() { return SearchBudget{1, PatternStyle::kTextbook, 100}; }
SearchBudget TargetedBudget() { return SearchBudget{5, PatternStyle::kTextbook, 10}; }

int CandidateCallBudget(const SearchBudget& budget) {
  return 3 + 4 * budget.perturbation_attempts;
}

void CheckBudget(const SearchBudget& budget) {
  if (budget.perturbation_attempts < 1) {
    throw UsageError("perturbation_attempts must be at least 1");
  }
  if (budget.max_patterns < 0) throw UsageError("max_patterns must not be negative");
}

namespace {

void Note(std::vector<std::string>* log, std::string line) {
  if (log) log->push_back(std::move(line));
}

std::string StylePhrase(PatternStyle style) {
  return style == PatternStyle::kTextbook
             ? "textbook-style"
             : "real-world, production-style (as found in application codebases)";
}

std::string FencedBody(const std::string& text) {
  if (auto block = LastFencedBlock(text)) return *block;
  return text;
}

}  // namespace

std::optional<CodeUnit> ParseGeneratedPattern(std::string_view code) {
  std::vector<std::string> kept;
  std::optional<std::string> call;
  for (const auto& line : SplitLines(code)) {
    if (StartsWith(line, "V = ") || StartsWith(line, "V=")) {
      call = std::string(Trim(line.substr(line.find('=') + 1)));
    } else {
      kept.push_back(line);
    }
  }
  if (!call || call->empty()) return std::nullopt;
  while (!kept.empty() && Trim(kept.back()).empty()) kept.pop_back();
  while (!kept.empty() && Trim(kept.front()).empty()) kept.erase(kept.begin());
  if (kept.empty()) return std::nullopt;
  CodeUnit unit;
  unit.language = Language::kPython;
  unit.source = Join(kept, "\n") + "\n";
  unit.invocation = *call;
  return unit;
}

FamiliarCandidate GenerateFamiliarPattern(const GeneratorContext& ctx, int index,
                                          PatternStyle style, CallBudget& budget,
                                          std::vector<std::string>* log) {
  LlmGateway& gw = *ctx.gateway;
  for (int attempt = 0;; ++attempt) {
    const std::string tag =
        "generate=" + std::to_string(index) + ";attempt=" + std::to_string(attempt);
    CompletionRequest req;
    req.messages = {{"user", gw.prompts().Render("generate_pattern",
                                                 {{"style_phrase", StylePhrase(style)},
                                                  {"index", std::to_string(index)}})}};
    req.purpose = Purpose::kGenerate;
    req.sample_tag = tag;
    req.budget = &budget;
    Completion c = gw.Complete(ctx.provider_id, req);
    auto unit = ParseGeneratedPattern(FencedBody(c.text));
    if (!unit) {
      Note(log, "generation " + std::to_string(attempt) + ": no `V = call` line");
      continue;
    }
    ExecResult r = ctx.oracle->ExecuteMemoized(*unit, ctx.limits);
    if (!r.ok()) {
      Note(log, "generation " + std::to_string(attempt) + ": P does not run (" +
                    r.Describe() + ")");
      continue;
    }
    if (r.stdout_normalized.empty()) {
      Note(log, "generation " + std::to_string(attempt) + ": P prints nothing");
      continue;
    }
    TrialRecord t = PredictOutput(gw, ctx.provider_id, *unit, PromptMode::kPlain, tag, &budget);
    if (!t.parsed || t.extracted_answer != r.stdout_normalized) {
      Note(log, "generation " + std::to_string(attempt) + ": provider predicts '" +
                    t.extracted_answer + "' but P gives '" + r.stdout_normalized + "'");
      continue;
    }
    Note(log, "generation " + std::to_string(attempt) + ": accepted, v = " + r.stdout_normalized);
    return {*unit, r.stdout_normalized};
  }
}

std::string PatternKey(const DeceptionPatternRecord& record) {
  Language lang = record.language();
  return Sha256Hex(CanonicalForm(lang, record.deceptive.source) + "\n--\n" +
                   CanonicalForm(lang, record.deceptive.invocation));
}

std::optional<DeceptionPatternRecord> PerturbPattern(
    const GeneratorContext& ctx, const FamiliarCandidate& familiar, int attempts,
    CallBudget& budget, const std::function<bool(const DeceptionPatternRecord&)>& accept,
    std::vector<std::string>* log, const std::string& tag) {
  LlmGateway& gw = *ctx.gateway;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const std::string attempt_tag = tag + ";perturb=" + std::to_string(attempt);
    CompletionRequest req;
    req.messages = {{"user", gw.prompts().Render("perturb",
                                                 {{"code", familiar.unit.source},
                                                  {"invocation", familiar.unit.invocation}})}};
    req.purpose = Purpose::kPerturb;
    req.sample_tag = attempt_tag;
    req.budget = &budget;
    Completion c = gw.Complete(ctx.provider_id, req);
    std::string body = FencedBody(c.text);
    std::vector<std::string> kept;
    for (const auto& line : SplitLines(body)) {
      if (!StartsWith(line, "V = ") && !StartsWith(line, "V=")) kept.push_back(line);
    }
    while (!kept.empty() && Trim(kept.back()).empty()) kept.pop_back();
    CodeUnit deceptive = familiar.unit;
    deceptive.source = Join(kept, "\n") + "\n";
    const std::string label = "perturbation " + std::to_string(attempt);
    if (Trim(deceptive.source).empty()) {
      Note(log, label + ": empty reply");
      continue;
    }
    ExecResult r = ctx.oracle->ExecuteMemoized(deceptive, ctx.limits);
    if (!r.ok()) {
      Note(log, label + ": P' does not run (" + r.Describe() + ")");
      continue;
    }
    if (r.stdout_normalized == familiar.value) {
      Note(log, label + ": output unchanged, rejected");
      continue;
    }
    DeceptionPatternRecord record;
    record.familiar = familiar.unit;
    record.deceptive = deceptive;
    record.delta_description = LineDiff(familiar.unit.source, deceptive.source);
    record.familiar_value = familiar.value;
    record.actual_value = r.stdout_normalized;
    record.origin = Origin::kMined;
    record.source_model = gw.Provider(ctx.provider_id).model_name;
    record.id = "mined-" + PatternKey(record).substr(0, 12);
    if (accept && !accept(record)) {
      Note(log, label + ": not accepted");
      continue;
    }
    Note(log, label + ": accepted, v' = " + r.stdout_normalized);
    return record;
  }
  return std::nullopt;
}

namespace {

// One generated record for targeted search or mining. Errors from the
// provider other than budget exhaustion propagate.
DiscoveryEvent DiscoverOne(const GeneratorContext& ctx, int index, const SearchBudget& budget,
                           bool require_misprediction) {
  DiscoveryEvent event;
  event.pattern_index = index;
  CallBudget calls(CandidateCallBudget(budget));
  try {
    FamiliarCandidate fam =
        GenerateFamiliarPattern(ctx, index, budget.pattern_style, calls, &event.log);
    auto accept = [&](const DeceptionPatternRecord& record) {
      ValidationReport report = ValidateRecord(record, *ctx.oracle, ctx.limits);
      if (!report.valid) {
        for (const auto& d : report.diagnostics) event.log.push_back("invalid: " + d);
        return false;
      }
      if (!require_misprediction) return true;
      TrialRecord t = PredictOutput(*ctx.gateway, ctx.provider_id, record.deceptive,
                                    PromptMode::kPlain,
                                    "validate=" + std::to_string(index), &calls);
      event.log.push_back("provider predicts '" + t.extracted_answer + "' for P'");
      return t.parsed && t.extracted_answer == record.familiar_value;
    };
    event.record = PerturbPattern(ctx, fam, budget.perturbation_attempts, calls, accept,
                                  &event.log, "pattern=" + std::to_string(index));
    event.succeeded = event.record.has_value();
  } catch (const BudgetExhaustedError& e) {
    event.log.push_back(e.what());
  }
  event.llm_calls_used = calls.used();
  return event;
}

}  // namespace

SearchOutcome RunFpaSearch(const GeneratorContext& ctx, const TargetProgram& x,
                           Strategy strategy, const TargetBehavior& behavior,
                           const std::vector<DeceptionPatternRecord>& candidates,
                           const SearchBudget& budget) {
  CheckBudget(budget);
  if (strategy == Strategy::kControl) {
    throw UsageError("the control injection is not an attack; use inject_phantom or hide_logic");
  }
  ExecResult base = ctx.oracle->ExecuteMemoized(x.unit, ctx.limits);
  if (!base.ok() || base.stdout_normalized != x.expected_output) {
    throw ValidationError("target '" + x.id + "' does not reproduce its expected output");
  }

  SearchOutcome out;
  // Returns true when `record` yields a working attack.
  auto try_record = [&](const DeceptionPatternRecord& record, DiscoveryEvent& event,
                        CallBudget& calls) {
    ++out.attempts;
    AttackSample sample;
    try {
      sample = ComposeAttack(x, record, strategy, behavior, *ctx.oracle);
    } catch (const InjectionError& e) {
      event.log.push_back(std::string("composition failed: ") + e.what());
      return false;
    }
    RuntimeCheck check = CheckRuntime(sample, *ctx.oracle, ctx.limits);
    if (!check.ok()) {
      for (const auto& d : check.diagnostics) event.log.push_back("runtime: " + d);
      return false;
    }
    TrialRecord t = PredictOutput(*ctx.gateway, ctx.provider_id, sample.composed,
                                  PromptMode::kPlain,
                                  "search=" + x.id + ";" + record.id, &calls);
    event.log.push_back("provider predicts '" + t.extracted_answer + "'");
    if (!t.parsed || t.extracted_answer == check.composed_output ||
        t.extracted_answer != check.unperturbed_output) {
      return false;
    }
    out.sample = sample;
    out.predicted_output = t.extracted_answer;
    out.actual_output = check.composed_output;
    out.familiar_output = check.unperturbed_output;
    return true;
  };

  if (!candidates.empty()) {
    int index = 0;
    for (const auto& record : candidates) {
      DiscoveryEvent event;
      event.pattern_index = ++index;
      event.record = record;
      CallBudget calls(CandidateCallBudget(budget));
      try {
        event.succeeded = try_record(record, event, calls);
      } catch (const BudgetExhaustedError& e) {
        event.log.push_back(e.what());
      }
      event.llm_calls_used = calls.used();
      out.events.push_back(std::move(event));
      if (out.sample) break;
    }
    return out;
  }

  for (int index = 1; index <= budget.max_patterns && !out.sample; ++index) {
    DiscoveryEvent event = DiscoverOne(ctx, index, budget, false);
    if (event.record) {
      CallBudget calls(CandidateCallBudget(budget));
      try {
        event.succeeded = try_record(*event.record, event, calls);
      } catch (const BudgetExhaustedError& e) {
        event.log.push_back(e.what());
      }
      event.llm_calls_used += calls.used();
    }
    out.events.push_back(std::move(event));
  }
  return out;
}

MiningResult MinePatterns(const GeneratorContext& ctx, const SearchBudget& budget,
                          const MiningOptions& options) {
  CheckBudget(budget);
  const int total = budget.max_patterns;
  std::vector<DiscoveryEvent> events(static_cast<std::size_t>(total));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < total;) {
      try {
        events[i] = DiscoverOne(ctx, i + 1, budget, true);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int j = 0; j < std::max(1, options.jobs); ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  MiningResult result;
  std::map<std::string, int> seen;
  for (auto& event : events) {
    if (event.succeeded) {
      std::string key = PatternKey(*event.record);
      if (seen.count(key)) {
        event.duplicate = true;
        event.log.push_back("duplicate of pattern " + std::to_string(seen[key]));
      } else {
        seen[key] = event.pattern_index;
        result.records.push_back(*event.record);
      }
    }
  }
  if (options.corpus_root) {
    for (const auto& record : result.records) SaveRecord(*options.corpus_root, record);
  }
  result.events = std::move(events);
  return result;
}

std::vector<int> DiscoveryCurve(const std::vector<DiscoveryEvent>& events) {
  std::vector<int> curve;
  int running = 0;
  for (const auto& e : events) {
    if (e.succeeded && !e.duplicate) ++running;
    curve.push_back(running);
  }
  return curve;
}

std::string DiscoveryCsv(const std::vector<DiscoveryEvent>& events) {
  std::ostringstream out;
  out << "pattern_index,succeeded,calls_used,duplicate\n";
  for (const auto& e : events) {
    out << e.pattern_index << ',' << (e.succeeded ? 1 : 0) << ',' << e.llm_calls_used << ','
        << (e.duplicate ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace fpa
