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

#ifndef FPA_SCRIPTED_PROVIDER_H_
#define FPA_SCRIPTED_PROVIDER_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpa/corpus.h"
#include "fpa/llm_gateway.h"

namespace fpa {

// Deterministic stand-ins for a model. config.script selects the behavior:
//
//   {"behavior": "faithful"}  predicts by running the program, rewrites
//                             verbatim, summarizes the rendered page
//   {"behavior": "bias"}      like faithful, but every known deceptive
//                             pattern is first replaced by its familiar
//                             twin (matched structurally, so renamed copies
//                             are recognized too)
//   {"behavior": "echo"}      summarizes every text node and script string
//   {"behavior": "schedule", "rules": [{"match": "...", "purpose": "...",
//                             "responses": ["...", ...]}]}
//                             the first rule whose `match` occurs in the last
//                             user message answers with responses[k], k being
//                             the "trial=k" number in the sample tag, else a
//                             per-prompt counter (both taken cyclically)
//   {"behavior": "miner", "success_every": 10, "distinct": true,
//                             "crash_every": 0}
//                             generates counting patterns and perturbs every
//                             k-th one into a working deception pattern
//   {"behavior": "judge"}     judge requests only
//
// Every behavior answers judge requests heuristically when no schedule rule
// claims them. Token counts are whitespace-separated word counts.
std::unique_ptr<Backend> MakeScriptedBackend(const ProviderConfig& config,
                                             const ScriptContext& context);

// `program` with each structural occurrence of a known deceptive pattern
// replaced by the familiar source, identifiers mapped accordingly. nullopt
// when nothing matched.
std::optional<std::string> SubstituteFamiliar(Language language, std::string_view program,
                                              const std::vector<DeceptionPatternRecord>& patterns);

// The final output a response commits to: the last fenced block, else the
// text after the last "output is", else the last non-empty line.
std::string HeuristicAnswer(std::string_view response);

// Loose equality used by the scripted judge: a leading "label:" is dropped,
// whitespace removed and case ignored.
bool LooselyEqual(std::string_view a, std::string_view b);

long WordCount(std::string_view text);

}  // namespace fpa

#endif  // FPA_SCRIPTED_PROVIDER_H_
