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

#ifndef FPA_LLM_GATEWAY_H_
#define FPA_LLM_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpa/code_unit.h"
#include "fpa/corpus.h"
#include "fpa/exec_oracle.h"
#include "fpa/prompts.h"

namespace fpa {

enum class ProviderKind { kOpenAi, kAnthropic, kGemini, kScripted };

std::string_view ProviderKindName(ProviderKind kind);
ProviderKind ParseProviderKind(std::string_view name);

enum class PromptMode { kPlain, kRobust };

std::string_view PromptModeName(PromptMode mode);
PromptMode ParsePromptMode(std::string_view name);

// What a request is for. Remote backends ignore it; scripted backends
// dispatch on it.
enum class Purpose {
  kPredict,
  kJudgeExtract,
  kJudgeEqual,
  kJudgeMentions,
  kGenerate,
  kPerturb,
  kRewrite,
  kSummarize,
};

std::string_view PurposeName(Purpose purpose);

struct ProviderConfig {
  std::string id;
  ProviderKind kind = ProviderKind::kScripted;
  // Base URL, or "local" for scripted providers.
  std::string endpoint = "local";
  std::string model_name;
  // Unset means the vendor default; nothing is sent.
  std::optional<double> temperature;
  int max_retries = 3;
  // Environment variable holding the API key. Empty for scripted providers.
  std::string credentials_env;
  // Concurrent in-flight requests allowed for this provider.
  int max_concurrent = 4;
  // Minimum spacing between request starts; 0 disables.
  std::chrono::milliseconds min_interval{0};
  // Scripted behavior description (see scripted_provider.h).
  nlohmann::json script = nlohmann::json::object();

  bool remote() const { return kind != ProviderKind::kScripted; }
};

// Reads a provider block from a configuration file. Unknown keys and any
// key that looks like a credential value are rejected.
ProviderConfig ParseProviderConfig(const nlohmann::json& j);
// Settings without secrets, for report headers.
nlohmann::json DescribeProvider(const ProviderConfig& config);

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  bool operator==(const Message&) const = default;
};

// Counts calls charged against one candidate of a search. Shared by every
// request made on the candidate's behalf.
class CallBudget {
 public:
  explicit CallBudget(int limit) : limit_(limit) {}
  // Throws BudgetExhaustedError when no calls remain.
  void Charge();
  int used() const { return used_; }
  int limit() const { return limit_; }

 private:
  int limit_;
  int used_ = 0;
};

struct CompletionRequest {
  std::vector<Message> messages;
  Purpose purpose = Purpose::kPredict;
  // Distinguishes repeated samples of the same prompt (for example
  // "trial=3") so each trial has its own cache entry.
  std::string sample_tag;
  CallBudget* budget = nullptr;
};

struct Completion {
  std::string text;
  long input_tokens = 0;
  long output_tokens = 0;
  bool from_cache = false;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual bool remote() const = 0;
  // Throws one of the ProviderError subclasses on failure.
  virtual Completion Complete(const ProviderConfig& config,
                              const CompletionRequest& request) = 0;
};

// Information scripted providers may consult: the oracle (for faithful
// answers) and the known deception patterns (for familiar-semantics bias).
struct ScriptContext {
  const ExecOracle* oracle = nullptr;
  std::vector<DeceptionPatternRecord> patterns;
};

struct GatewayOptions {
  std::optional<std::filesystem::path> cache_dir;
  bool offline = false;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_cap{20000};
  // Provider answering judge requests. Empty selects the built-in local
  // judge.
  std::string judge_provider;
  const PromptLibrary* prompts = nullptr;  // null: PromptLibrary::Builtin()
  ScriptContext script;
};

struct UsageTotals {
  long requests = 0;      // Complete() calls answered
  long cache_hits = 0;
  long backend_calls = 0; // attempts that reached a backend, retries included
  long input_tokens = 0;
  long output_tokens = 0;
};

class LlmGateway {
 public:
  static constexpr const char* kLocalJudgeId = "local-judge";

  explicit LlmGateway(GatewayOptions options = {});
  ~LlmGateway();
  LlmGateway(const LlmGateway&) = delete;
  LlmGateway& operator=(const LlmGateway&) = delete;

  // Throws UsageError on duplicate ids or a negative temperature and
  // AuthError when a remote provider's credentials variable is unset.
  void Register(const ProviderConfig& config);
  void RegisterBackend(const ProviderConfig& config, std::unique_ptr<Backend> backend);

  bool HasProvider(const std::string& id) const;
  const ProviderConfig& Provider(const std::string& id) const;
  std::vector<std::string> ProviderIds() const;
  const std::string& JudgeId() const { return judge_id_; }
  const PromptLibrary& prompts() const { return *prompts_; }
  const GatewayOptions& options() const { return options_; }

  // Served from the cache when possible; otherwise the backend is called
  // with retries on transient and rate-limit failures.
  Completion Complete(const std::string& provider_id, const CompletionRequest& request);

  // Content hash of (provider id, model, temperature, messages, sample tag).
  static std::string RequestKey(const ProviderConfig& config,
                                const CompletionRequest& request);

  UsageTotals Usage(const std::string& provider_id) const;
  UsageTotals TotalUsage() const;
  // Backend calls made to remote providers.
  long NetworkCalls() const { return network_calls_.load(); }

 private:
  struct ProviderSlot;
  ProviderSlot& Slot(const std::string& id) const;
  std::optional<Completion> CacheGet(const std::string& key) const;
  void CachePut(const std::string& key, const Completion& completion) const;

  GatewayOptions options_;
  const PromptLibrary* prompts_;
  std::string judge_id_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<ProviderSlot>> slots_;
  std::atomic<long> network_calls_{0};
};

struct TokenCost {
  long input = 0;
  long output = 0;
};

// One sampled prediction f_i(x).
struct TrialRecord {
  std::string provider_id;
  PromptMode prompt_mode = PromptMode::kPlain;
  // MessagesHash of the prediction request.
  std::string prompt_hash;
  std::string sample_tag;
  std::string raw_response;
  std::string extracted_answer;
  bool parsed = false;
  // Set by the evaluator against oracle truth.
  std::optional<bool> matched_truth;
  // Prediction and judge calls together.
  TokenCost token_cost;
  bool from_cache = false;
};

nlohmann::json TrialToJson(const TrialRecord& trial);

// Content hash of a message list alone (no provider, no sample tag).
std::string MessagesHash(const std::vector<Message>& messages);

// The prediction request for `unit`. Robust mode adds the warning as a
// leading system message; the user message is identical in both modes.
std::vector<Message> PredictionMessages(const CodeUnit& unit, PromptMode mode,
                                        const PromptLibrary& prompts);

// Unparseable judge output yields parsed == false and an empty answer.
// Provider errors propagate.
TrialRecord PredictOutput(LlmGateway& gateway, const std::string& provider_id,
                          const CodeUnit& unit, PromptMode mode,
                          const std::string& sample_tag, CallBudget* budget = nullptr);

// True when the response is already a single bare value and needs no judge.
bool IsBareValue(std::string_view response);

// Normalized final answer. Throws UsageError for an empty response and
// UnparseableError when the judge does not comply after one re-ask.
std::string JudgeExtract(LlmGateway& gateway, std::string_view raw_response,
                         std::string_view question_context,
                         const std::string& sample_tag, CallBudget* budget = nullptr,
                         TokenCost* cost = nullptr);

// Exact match after normalization. When that fails and `gateway` is given,
// the judge decides whether the two answers mean the same output.
bool JudgeEqual(std::string_view a, std::string_view b, LlmGateway* gateway = nullptr,
                const std::string& sample_tag = {});

// Asks the judge whether `summary` mentions or paraphrases `content`.
bool JudgeMentions(LlmGateway& gateway, std::string_view summary, std::string_view content,
                   const std::string& sample_tag = {});

// Contents of the `<answer>` element, or nullopt.
std::optional<std::string> AnswerTag(std::string_view text);
// Body of the last ``` fenced block; `info` receives the fence's info string.
std::optional<std::string> LastFencedBlock(std::string_view text, std::string* info = nullptr);

}  // namespace fpa

#endif  // FPA_LLM_GATEWAY_H_
