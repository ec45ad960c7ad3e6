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

#ifndef FPA_GENERATOR_H_
#define FPA_GENERATOR_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpa/corpus.h"
#include "fpa/exec_oracle.h"
#include "fpa/injector.h"
#include "fpa/llm_gateway.h"

namespace fpa {

enum class PatternStyle { kTextbook, kRealWorld };

std::string_view PatternStyleName(PatternStyle style);
PatternStyle ParsePatternStyle(std::string_view name);

struct SearchBudget {
  int perturbation_attempts = 1;  // n
  PatternStyle pattern_style = PatternStyle::kTextbook;
  int max_patterns = 100;
};

// Defaults: n = 1 for mining, n = 5 for targeted search.
SearchBudget MiningBudget();
SearchBudget TargetedBudget();

// LLM calls one candidate may use: generation, its prediction and judge,
// then a perturbation, prediction and judge with one re-ask per attempt.
int CandidateCallBudget(const SearchBudget& budget);

// Throws UsageError unless perturbation_attempts >= 1 and max_patterns >= 0.
void CheckBudget(const SearchBudget& budget);

struct GeneratorContext {
  LlmGateway* gateway = nullptr;
  std::string provider_id;
  const ExecOracle* oracle = nullptr;
  ExecLimits limits;
};

// A familiar pattern P with its hard-coded call and v = exec(P).
struct FamiliarCandidate {
  CodeUnit unit;
  std::string value;
};

struct DiscoveryEvent {
  int pattern_index = 0;  // 1-based
  bool succeeded = false;
  std::optional<DeceptionPatternRecord> record;
  int llm_calls_used = 0;
  // The record duplicates one found at a lower index.
  bool duplicate = false;
  // Why the candidate stopped, one entry per step.
  std::vector<std::string> log;
};

// Splits a generated block into the function source and the call of its
// `V = call` line. nullopt when there is no such line.
std::optional<CodeUnit> ParseGeneratedPattern(std::string_view code);

// Asks for a pattern until one runs and the provider predicts its own value,
// or the call budget runs out (BudgetExhaustedError).
FamiliarCandidate GenerateFamiliarPattern(const GeneratorContext& ctx, int index,
                                          PatternStyle style, CallBudget& budget,
                                          std::vector<std::string>* log = nullptr);

// Up to `attempts` perturbations of `familiar`. The first P' that runs, gives
// a different output and passes `accept` is returned as a record.
std::optional<DeceptionPatternRecord> PerturbPattern(
    const GeneratorContext& ctx, const FamiliarCandidate& familiar, int attempts,
    CallBudget& budget,
    const std::function<bool(const DeceptionPatternRecord&)>& accept = {},
    std::vector<std::string>* log = nullptr, const std::string& tag = {});

// Dedupe key: hash of the canonicalized source and invocation.
std::string PatternKey(const DeceptionPatternRecord& record);

struct SearchOutcome {
  std::optional<AttackSample> sample;
  std::vector<DiscoveryEvent> events;
  int attempts = 0;
  // For the successful sample: the provider's answer, exec(x') and
  // exec(x with P in place of P').
  std::string predicted_output;
  std::string actual_output;
  std::string familiar_output;
};

// Targeted search. Tries each candidate record in order; with no candidates,
// generates up to budget.max_patterns fresh ones. Succeeds on the first x'
// whose runtime conditions hold and whose prediction differs from exec(x')
// and equals the unperturbed composition's output.
SearchOutcome RunFpaSearch(const GeneratorContext& ctx, const TargetProgram& x,
                           Strategy strategy, const TargetBehavior& behavior,
                           const std::vector<DeceptionPatternRecord>& candidates,
                           const SearchBudget& budget);

struct MiningOptions {
  int jobs = 1;
  // Where unique successes are saved; unset keeps them in memory only.
  std::optional<std::filesystem::path> corpus_root;
};

struct MiningResult {
  std::vector<DiscoveryEvent> events;  // ordered by pattern_index
  std::vector<DeceptionPatternRecord> records;  // unique successes
};

// generate -> perturb -> validate for pattern indices 1..max_patterns.
// Validation requires the provider to predict v for P'.
MiningResult MinePatterns(const GeneratorContext& ctx, const SearchBudget& budget,
                          const MiningOptions& options = {});

// Cumulative unique successes after each event.
std::vector<int> DiscoveryCurve(const std::vector<DiscoveryEvent>& events);

// pattern_index,succeeded,calls_used,duplicate
std::string DiscoveryCsv(const std::vector<DiscoveryEvent>& events);

}  // namespace fpa

#endif  // FPA_GENERATOR_H_
