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

#ifndef FPA_RUN_CONFIG_H_
#define FPA_RUN_CONFIG_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpa/corpus.h"
#include "fpa/evaluator.h"
#include "fpa/generator.h"
#include "fpa/llm_gateway.h"

namespace fpa {

// A campaign file. Relative paths resolve against the file's directory.
//
// {
//   "providers": [{"id": "gpt-4o", "kind": "openai", "model": "gpt-4o"}],
//   "judge": "gpt-4o",                 // optional, default local-judge
//   "corpus": ["../corpus/seed"],
//   "targets": ["luhn"], "patterns": ["lswr"],   // optional filters
//   "strategy": "inject_phantom", "n_trials": 10, "baseline_threshold": 0.65,
//   "conditions": ["clean", "control", "attack"], "prompt_mode": "plain",
//   "lambda": 1.0, "jobs": 4, "compute_risk": true, "adaptive": false,
//   "ablation_seed": null, "cache_dir": "../cache", "output_dir": "../reports/x",
//   "defense": {"fixtures": "../fixtures/html", "patterns": "../corpus/web",
//               "decoy": "...", "armor_pattern": "vowel-js"}
// }
struct DefenseSettings {
  std::filesystem::path fixtures;
  std::filesystem::path patterns;
  std::string decoy;
  std::string armor_pattern = "vowel-js";
};

struct RunConfig {
  std::filesystem::path file;
  std::string file_hash;  // sha256 of the file bytes
  nlohmann::json raw;

  std::vector<ProviderConfig> providers;
  std::string judge;
  std::vector<std::filesystem::path> corpus_roots;
  std::vector<std::string> targets;
  std::vector<std::string> patterns;
  EvaluationConfig eval;
  CampaignOptions campaign;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path output_dir;
  DefenseSettings defense;
};

// Throws UsageError for a missing file, invalid JSON, unknown keys or bad
// values, and for API keys written into the file.
RunConfig LoadRunConfig(const std::filesystem::path& file);
RunConfig ParseRunConfig(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Corpus of every root; load problems raise ValidationError.
Corpus LoadRunCorpus(const RunConfig& config);

// Gateway with every configured provider registered. Scripted providers see
// `oracle` and all corpus and defense patterns.
std::unique_ptr<LlmGateway> MakeGateway(const RunConfig& config, const ExecOracle& oracle,
                                        bool offline,
                                        const std::vector<DeceptionPatternRecord>& patterns);

// Targets x patterns of the same language, after the id filters. Throws
// UsageError for filter ids that name nothing.
std::vector<EvalSample> BuildSamples(const RunConfig& config, const Corpus& corpus);

}  // namespace fpa

#endif  // FPA_RUN_CONFIG_H_
