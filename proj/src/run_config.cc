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

#include "fpa/run_config.h"

#include <set>

#include "fpa/defense.h"
#include "fpa/errors.h"
#include "fpa/text_util.h"

namespace fpa {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKeys = {
    "providers", "judge",       "corpus",       "targets",       "patterns",
    "strategy",  "n_trials",    "baseline_threshold", "conditions", "prompt_mode",
    "lambda",    "jobs",        "compute_risk", "adaptive",      "ablation_seed",
    "cache_dir", "output_dir",  "defense",      "description"};

const std::set<std::string> kDefenseKeys = {"fixtures", "patterns", "decoy", "armor_pattern"};

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::vector<std::string> Strings(const json& j, const std::string& key) {
  if (!j.is_array()) throw UsageError("config: '" + key + "' must be a list of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw UsageError("config: '" + key + "' must be a list of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

template <typename T>
T Get(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: '" + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig ParseRunConfig(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw UsageError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  c.raw = j;
  if (!j.contains("providers") || !j["providers"].is_array() || j["providers"].empty()) {
    throw UsageError("config: 'providers' must list at least one provider");
  }
  std::set<std::string> ids;
  for (const auto& p : j["providers"]) {
    ProviderConfig pc = ParseProviderConfig(p);
    if (!ids.insert(pc.id).second) throw UsageError("config: provider '" + pc.id + "' repeats");
    c.providers.push_back(pc);
  }
  c.judge = Get<std::string>(j, "judge", "");
  if (!c.judge.empty() && c.judge != LlmGateway::kLocalJudgeId && !ids.count(c.judge)) {
    throw UsageError("config: judge '" + c.judge + "' is not a configured provider");
  }
  if (c.judge == LlmGateway::kLocalJudgeId) c.judge.clear();
  if (j.contains("corpus")) {
    for (const auto& p : Strings(j["corpus"], "corpus")) c.corpus_roots.push_back(Resolve(base_dir, p));
  }
  if (j.contains("targets")) c.targets = Strings(j["targets"], "targets");
  if (j.contains("patterns")) c.patterns = Strings(j["patterns"], "patterns");

  EvaluationConfig& e = c.eval;
  e.providers = c.providers;
  e.n_trials = Get<int>(j, "n_trials", e.n_trials);
  e.baseline_threshold = Get<double>(j, "baseline_threshold", e.baseline_threshold);
  if (j.contains("conditions")) {
    e.conditions.clear();
    for (const auto& name : Strings(j["conditions"], "conditions")) {
      e.conditions.push_back(ParseCondition(name));
    }
  }
  try {
    e.prompt_mode = ParsePromptMode(Get<std::string>(j, "prompt_mode", "plain"));
    e.strategy = ParseStrategy(Get<std::string>(j, "strategy", "inject_phantom"));
  } catch (const Error& err) {
    throw UsageError(std::string("config: ") + err.what());
  }
  e.lambda_weight = Get<double>(j, "lambda", e.lambda_weight);
  e.jobs = Get<int>(j, "jobs", e.jobs);
  CheckConfig(e);

  c.campaign.compute_risk = Get<bool>(j, "compute_risk", false);
  c.campaign.adaptive = Get<bool>(j, "adaptive", false);
  if (j.contains("ablation_seed") && !j["ablation_seed"].is_null()) {
    c.campaign.ablation_seed = Get<std::uint64_t>(j, "ablation_seed", 0);
  }
  if (j.contains("cache_dir") && !j["cache_dir"].is_null()) {
    c.cache_dir = Resolve(base_dir, Get<std::string>(j, "cache_dir", ""));
  }
  c.output_dir = Resolve(base_dir, Get<std::string>(j, "output_dir", "reports"));

  c.defense.decoy = std::string(kDefaultDecoy);
  if (j.contains("defense")) {
    const json& d = j["defense"];
    if (!d.is_object()) throw UsageError("config: 'defense' must be an object");
    for (const auto& [key, value] : d.items()) {
      if (!kDefenseKeys.count(key)) throw UsageError("config: unknown key 'defense." + key + "'");
    }
    if (d.contains("fixtures")) c.defense.fixtures = Resolve(base_dir, d["fixtures"].get<std::string>());
    if (d.contains("patterns")) c.defense.patterns = Resolve(base_dir, d["patterns"].get<std::string>());
    c.defense.decoy = Get<std::string>(d, "decoy", c.defense.decoy);
    c.defense.armor_pattern = Get<std::string>(d, "armor_pattern", c.defense.armor_pattern);
  }
  return c;
}

RunConfig LoadRunConfig(const fs::path& file) {
  if (!fs::is_regular_file(file)) throw UsageError("no such config file: " + file.string());
  std::string text = ReadFile(file);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(file.string() + ": invalid JSON: " + e.what());
  }
  fs::path base = fs::absolute(file).parent_path();
  RunConfig c = ParseRunConfig(j, base);
  c.file = file;
  c.file_hash = Sha256Hex(text);
  return c;
}

Corpus LoadRunCorpus(const RunConfig& config) {
  if (config.corpus_roots.empty()) return {};
  Corpus corpus = LoadCorpora(config.corpus_roots);
  if (!corpus.ok()) {
    std::vector<std::string> lines;
    for (const auto& p : corpus.problems) lines.push_back(p.file.string() + ": " + p.message);
    throw ValidationError("corpus problems:\n" + Join(lines, "\n"));
  }
  return corpus;
}

std::unique_ptr<LlmGateway> MakeGateway(const RunConfig& config, const ExecOracle& oracle,
                                        bool offline,
                                        const std::vector<DeceptionPatternRecord>& patterns) {
  GatewayOptions o;
  o.cache_dir = config.cache_dir;
  o.offline = offline;
  o.judge_provider = config.judge;
  o.script.oracle = &oracle;
  o.script.patterns = patterns;
  auto gateway = std::make_unique<LlmGateway>(o);
  for (const auto& p : config.providers) gateway->Register(p);
  return gateway;
}

std::vector<EvalSample> BuildSamples(const RunConfig& config, const Corpus& corpus) {
  std::vector<TargetProgram> targets;
  if (config.targets.empty()) {
    targets = corpus.targets;
  } else {
    for (const auto& id : config.targets) targets.push_back(corpus.Target(id));
  }
  std::vector<DeceptionPatternRecord> patterns;
  if (config.patterns.empty()) {
    patterns = corpus.patterns;
  } else {
    for (const auto& id : config.patterns) patterns.push_back(corpus.Pattern(id));
  }
  return PairSamples(targets, patterns, config.eval.strategy);
}

}  // namespace fpa
