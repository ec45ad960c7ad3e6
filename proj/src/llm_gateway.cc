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

#include "fpa/llm_gateway.h"

#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "fpa/errors.h"
#include "fpa/http_backend.h"
#include "fpa/scripted_provider.h"
#include "fpa/text_util.h"

namespace fpa {

using nlohmann::json;

std::string_view ProviderKindName(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kOpenAi: return "openai";
    case ProviderKind::kAnthropic: return "anthropic";
    case ProviderKind::kGemini: return "gemini";
    case ProviderKind::kScripted: return "scripted";
  }
  return "?";
}

ProviderKind ParseProviderKind(std::string_view name) {
  for (auto k : {ProviderKind::kOpenAi, ProviderKind::kAnthropic, ProviderKind::kGemini,
                 ProviderKind::kScripted}) {
    if (ProviderKindName(k) == name) return k;
  }
  throw UsageError("unknown provider kind '" + std::string(name) +
                   "' (expected openai, anthropic, gemini or scripted)");
}

std::string_view PromptModeName(PromptMode mode) {
  return mode == PromptMode::kPlain ? "plain" : "robust";
}

PromptMode ParsePromptMode(std::string_view name) {
  if (name == "plain") return PromptMode::kPlain;
  if (name == "robust") return PromptMode::kRobust;
  throw UsageError("unknown prompt mode '" + std::string(name) + "'");
}

std::string_view PurposeName(Purpose purpose) {
  switch (purpose) {
    case Purpose::kPredict: return "predict";
    case Purpose::kJudgeExtract: return "judge_extract";
    case Purpose::kJudgeEqual: return "judge_equal";
    case Purpose::kJudgeMentions: return "judge_mentions";
    case Purpose::kGenerate: return "generate";
    case Purpose::kPerturb: return "perturb";
    case Purpose::kRewrite: return "rewrite";
    case Purpose::kSummarize: return "summarize";
  }
  return "?";
}

namespace {

std::string DefaultEndpoint(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kOpenAi: return "https://api.openai.com";
    case ProviderKind::kAnthropic: return "https://api.anthropic.com";
    case ProviderKind::kGemini: return "https://generativelanguage.googleapis.com";
    case ProviderKind::kScripted: return "local";
  }
  return "local";
}

std::string DefaultCredentialsEnv(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kOpenAi: return "OPENAI_API_KEY";
    case ProviderKind::kAnthropic: return "ANTHROPIC_API_KEY";
    case ProviderKind::kGemini: return "GEMINI_API_KEY";
    case ProviderKind::kScripted: return "";
  }
  return "";
}

// Leading blank lines are dropped as well as the trailing whitespace that
// NormalizeOutput removes.
std::string NormalizeAnswer(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && (text[i] == '\n' || text[i] == '\r')) ++i;
  return NormalizeOutput(text.substr(i));
}

}  // namespace

ProviderConfig ParseProviderConfig(const json& j) {
  if (!j.is_object()) throw UsageError("provider entry must be an object");
  static const std::vector<std::string> kKnown = {
      "id", "kind", "endpoint", "model", "temperature", "max_retries",
      "credentials_env", "max_concurrent", "min_interval_ms", "script"};
  for (const auto& [key, value] : j.items()) {
    std::string lower = ToLower(key);
    if (lower.find("key") != std::string::npos && lower != "credentials_env") {
      throw UsageError("provider field '" + key +
                       "' looks like a credential; API keys are read from the "
                       "environment only (set credentials_env)");
    }
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw UsageError("unknown provider field '" + key + "'");
    }
  }
  ProviderConfig c;
  try {
    c.id = j.at("id").get<std::string>();
    c.kind = ParseProviderKind(j.value("kind", std::string("scripted")));
    c.endpoint = j.value("endpoint", DefaultEndpoint(c.kind));
    c.model_name = j.value("model", c.kind == ProviderKind::kScripted ? c.id : "");
    if (j.contains("temperature") && !j["temperature"].is_null()) {
      c.temperature = j["temperature"].get<double>();
    }
    c.max_retries = j.value("max_retries", 3);
    c.credentials_env = j.value("credentials_env", DefaultCredentialsEnv(c.kind));
    c.max_concurrent = j.value("max_concurrent", 4);
    c.min_interval = std::chrono::milliseconds(j.value("min_interval_ms", 0));
    if (j.contains("script")) c.script = j["script"];
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad provider entry: ") + e.what());
  }
  if (c.id.empty()) throw UsageError("provider id must not be empty");
  if (c.remote() && c.model_name.empty()) {
    throw UsageError("provider '" + c.id + "' needs a model name");
  }
  if (c.max_retries < 0 || c.max_concurrent < 1) {
    throw UsageError("provider '" + c.id + "': max_retries >= 0 and max_concurrent >= 1");
  }
  return c;
}

json DescribeProvider(const ProviderConfig& c) {
  json j = {{"id", c.id},
            {"kind", ProviderKindName(c.kind)},
            {"endpoint", c.endpoint},
            {"model", c.model_name},
            {"temperature", c.temperature ? json(*c.temperature) : json("provider default")},
            {"max_retries", c.max_retries}};
  if (!c.credentials_env.empty()) j["credentials_env"] = c.credentials_env;
  if (!c.script.empty()) j["script"] = c.script;
  return j;
}

void CallBudget::Charge() {
  if (used_ >= limit_) {
    throw BudgetExhaustedError("LLM call budget of " + std::to_string(limit_) +
                               " exhausted");
  }
  ++used_;
}

struct LlmGateway::ProviderSlot {
  ProviderConfig config;
  std::unique_ptr<Backend> backend;

  std::mutex mu;
  std::condition_variable cv;
  int in_flight = 0;
  std::chrono::steady_clock::time_point next_start{};
  UsageTotals usage;

  void Acquire() {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return in_flight < config.max_concurrent; });
    ++in_flight;
    if (config.min_interval.count() > 0) {
      auto now = std::chrono::steady_clock::now();
      auto start = std::max(now, next_start);
      next_start = start + config.min_interval;
      lock.unlock();
      std::this_thread::sleep_until(start);
    }
  }
  void Release() {
    {
      std::lock_guard lock(mu);
      --in_flight;
    }
    cv.notify_one();
  }
};

LlmGateway::LlmGateway(GatewayOptions options)
    : options_(std::move(options)),
      prompts_(options_.prompts ? options_.prompts : &PromptLibrary::Builtin()) {
  if (options_.cache_dir) std::filesystem::create_directories(*options_.cache_dir);
  if (options_.judge_provider.empty()) {
    ProviderConfig judge;
    judge.id = kLocalJudgeId;
    judge.model_name = kLocalJudgeId;
    judge.script = {{"behavior", "judge"}};
    Register(judge);
    judge_id_ = kLocalJudgeId;
  } else {
    judge_id_ = options_.judge_provider;
  }
}

LlmGateway::~LlmGateway() = default;

void LlmGateway::Register(const ProviderConfig& config) {
  if (config.remote()) {
    const char* key = config.credentials_env.empty()
                          ? nullptr
                          : std::getenv(config.credentials_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw AuthError("provider '" + config.id + "': credentials variable " +
                      (config.credentials_env.empty() ? std::string("(none configured)")
                                                      : config.credentials_env) +
                      " is not set");
    }
    RegisterBackend(config, MakeHttpBackend(config));
  } else {
    RegisterBackend(config, MakeScriptedBackend(config, options_.script));
  }
}

void LlmGateway::RegisterBackend(const ProviderConfig& config,
                                 std::unique_ptr<Backend> backend) {
  if (config.id.empty()) throw UsageError("provider id must not be empty");
  if (config.temperature && *config.temperature < 0) {
    throw UsageError("provider '" + config.id + "': temperature must be >= 0");
  }
  std::lock_guard lock(mu_);
  if (slots_.count(config.id)) {
    throw UsageError("duplicate provider id '" + config.id + "'");
  }
  auto slot = std::make_unique<ProviderSlot>();
  slot->config = config;
  slot->backend = std::move(backend);
  slots_[config.id] = std::move(slot);
}

bool LlmGateway::HasProvider(const std::string& id) const {
  std::lock_guard lock(mu_);
  return slots_.count(id) > 0;
}

LlmGateway::ProviderSlot& LlmGateway::Slot(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw UsageError("unknown provider '" + id + "'");
  return *it->second;
}

const ProviderConfig& LlmGateway::Provider(const std::string& id) const {
  return Slot(id).config;
}

std::vector<std::string> LlmGateway::ProviderIds() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, slot] : slots_) ids.push_back(id);
  return ids;
}

std::string LlmGateway::RequestKey(const ProviderConfig& config,
                                   const CompletionRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({m.role, m.content});
  json key = {config.id,
              config.model_name,
              config.temperature ? json(*config.temperature) : json(nullptr),
              messages,
              request.sample_tag};
  return Sha256Hex(key.dump());
}

std::optional<Completion> LlmGateway::CacheGet(const std::string& key) const {
  if (!options_.cache_dir) return std::nullopt;
  auto path = *options_.cache_dir / key.substr(0, 2) / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    Completion c;
    c.text = j.at("text").get<std::string>();
    c.input_tokens = j.at("input_tokens").get<long>();
    c.output_tokens = j.at("output_tokens").get<long>();
    c.from_cache = true;
    return c;
  } catch (const json::exception&) {
    return std::nullopt;  // a torn or foreign file is treated as a miss
  }
}

void LlmGateway::CachePut(const std::string& key, const Completion& c) const {
  if (!options_.cache_dir) return;
  auto dir = *options_.cache_dir / key.substr(0, 2);
  std::filesystem::create_directories(dir);
  json j = {{"text", c.text}, {"input_tokens", c.input_tokens},
            {"output_tokens", c.output_tokens}};
  auto tmp = dir / (key + ".tmp." + std::to_string(std::hash<std::thread::id>{}(
                                        std::this_thread::get_id())));
  WriteFile(tmp, j.dump(1));
  std::filesystem::rename(tmp, dir / (key + ".json"));
}

Completion LlmGateway::Complete(const std::string& provider_id,
                                const CompletionRequest& request) {
  ProviderSlot& slot = Slot(provider_id);
  if (request.messages.empty()) throw UsageError("completion request has no messages");
  if (request.budget) request.budget->Charge();

  const std::string key = RequestKey(slot.config, request);
  if (auto hit = CacheGet(key)) {
    std::lock_guard lock(slot.mu);
    slot.usage.requests++;
    slot.usage.cache_hits++;
    slot.usage.input_tokens += hit->input_tokens;
    slot.usage.output_tokens += hit->output_tokens;
    return *hit;
  }
  const bool remote = slot.backend->remote();
  if (remote && options_.offline) {
    throw OfflineError("offline mode: request to provider '" + provider_id +
                       "' is not in the cache");
  }

  const int attempts = 1 + slot.config.max_retries;
  for (int attempt = 0;; ++attempt) {
    slot.Acquire();
    {
      std::lock_guard lock(slot.mu);
      slot.usage.backend_calls++;
    }
    if (remote) network_calls_++;
    try {
      Completion c = slot.backend->Complete(slot.config, request);
      slot.Release();
      c.from_cache = false;
      CachePut(key, c);
      std::lock_guard lock(slot.mu);
      slot.usage.requests++;
      slot.usage.input_tokens += c.input_tokens;
      slot.usage.output_tokens += c.output_tokens;
      return c;
    } catch (const TransientError& e) {
      slot.Release();
      if (attempt + 1 >= attempts) {
        throw TransientError("provider '" + provider_id + "' failed after " +
                             std::to_string(attempts) + " attempts: " + e.what());
      }
    } catch (const RateLimitError& e) {
      slot.Release();
      if (attempt + 1 >= attempts) {
        throw RateLimitError("provider '" + provider_id + "' still rate limited after " +
                             std::to_string(attempts) + " attempts: " + e.what());
      }
    } catch (...) {
      slot.Release();
      throw;
    }
    auto delay = options_.backoff_base * (1L << std::min(attempt, 16));
    std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(delay, options_.backoff_cap));
  }
}

UsageTotals LlmGateway::Usage(const std::string& provider_id) const {
  ProviderSlot& slot = Slot(provider_id);
  std::lock_guard lock(slot.mu);
  return slot.usage;
}

UsageTotals LlmGateway::TotalUsage() const {
  UsageTotals total;
  for (const auto& id : ProviderIds()) {
    UsageTotals u = Usage(id);
    total.requests += u.requests;
    total.cache_hits += u.cache_hits;
    total.backend_calls += u.backend_calls;
    total.input_tokens += u.input_tokens;
    total.output_tokens += u.output_tokens;
  }
  return total;
}

json TrialToJson(const TrialRecord& t) {
  return {{"provider_id", t.provider_id},
          {"prompt_mode", PromptModeName(t.prompt_mode)},
          {"prompt_hash", t.prompt_hash},
          {"sample_tag", t.sample_tag},
          {"raw_response", t.raw_response},
          {"extracted_answer", t.extracted_answer},
          {"parsed", t.parsed},
          {"matched_truth", t.matched_truth ? json(*t.matched_truth) : json(nullptr)},
          {"input_tokens", t.token_cost.input},
          {"output_tokens", t.token_cost.output}};
}

std::string MessagesHash(const std::vector<Message>& messages) {
  json j = json::array();
  for (const auto& m : messages) j.push_back({m.role, m.content});
  return Sha256Hex(j.dump());
}

std::vector<Message> PredictionMessages(const CodeUnit& unit, PromptMode mode,
                                        const PromptLibrary& prompts) {
  std::string language(LanguageName(unit.language));
  std::vector<Message> messages;
  if (mode == PromptMode::kRobust) {
    messages.push_back({"system", prompts.Get("robust_warning")});
  }
  messages.push_back({"user", prompts.Render("predict", {{"language", language},
                                                         {"code", AssembleProgram(unit)}})});
  return messages;
}

TrialRecord PredictOutput(LlmGateway& gateway, const std::string& provider_id,
                          const CodeUnit& unit, PromptMode mode,
                          const std::string& sample_tag, CallBudget* budget) {
  CompletionRequest req;
  req.messages = PredictionMessages(unit, mode, gateway.prompts());
  req.purpose = Purpose::kPredict;
  req.sample_tag = sample_tag;
  req.budget = budget;

  TrialRecord t;
  t.provider_id = provider_id;
  t.prompt_mode = mode;
  t.prompt_hash = MessagesHash(req.messages);
  t.sample_tag = sample_tag;
  Completion c = gateway.Complete(provider_id, req);
  t.raw_response = c.text;
  t.from_cache = c.from_cache;
  t.token_cost = {c.input_tokens, c.output_tokens};
  if (Trim(c.text).empty()) return t;  // unparseable
  try {
    t.extracted_answer = JudgeExtract(gateway, c.text, req.messages.back().content,
                                      sample_tag, budget, &t.token_cost);
    t.parsed = !t.extracted_answer.empty();
  } catch (const UnparseableError&) {
    t.parsed = false;
  }
  return t;
}

bool IsBareValue(std::string_view response) {
  std::string s = NormalizeAnswer(response);
  if (s.empty() || s.find('\n') != std::string::npos) return false;
  if (s.find('`') != std::string::npos) return false;
  if (s.find_first_of(" \t") == std::string::npos) return true;
  static const std::string kOpen = "[({\"'";
  static const std::string kClose = "])}\"'";
  auto pos = kOpen.find(s.front());
  return pos != std::string::npos && s.size() >= 2 && s.back() == kClose[pos];
}

namespace {

Completion AskJudge(LlmGateway& gateway, Purpose purpose, std::vector<Message>& messages,
                    const std::string& sample_tag, CallBudget* budget, TokenCost* cost) {
  CompletionRequest req;
  req.messages = messages;
  req.purpose = purpose;
  req.sample_tag = sample_tag;
  req.budget = budget;
  Completion c = gateway.Complete(gateway.JudgeId(), req);
  if (cost) {
    cost->input += c.input_tokens;
    cost->output += c.output_tokens;
  }
  messages.push_back({"assistant", c.text});
  return c;
}

// Runs a judge conversation with one re-ask. Returns the tag contents.
std::string JudgeConversation(LlmGateway& gateway, Purpose purpose, std::string prompt,
                              const std::string& sample_tag, CallBudget* budget,
                              TokenCost* cost) {
  std::vector<Message> messages = {{"user", std::move(prompt)}};
  for (int round = 0; round < 2; ++round) {
    if (round == 1) messages.push_back({"user", gateway.prompts().Get("judge_reask")});
    Completion c = AskJudge(gateway, purpose, messages, sample_tag, budget, cost);
    if (auto answer = AnswerTag(c.text)) {
      std::string normalized = NormalizeAnswer(*answer);
      if (!normalized.empty()) return normalized;
    }
  }
  throw UnparseableError("judge reply did not contain an <answer> after one re-ask");
}

}  // namespace

std::string JudgeExtract(LlmGateway& gateway, std::string_view raw_response,
                         std::string_view question_context, const std::string& sample_tag,
                         CallBudget* budget, TokenCost* cost) {
  if (Trim(raw_response).empty()) throw UsageError("judge_extract: empty response");
  if (IsBareValue(raw_response)) return NormalizeAnswer(raw_response);
  std::string prompt = gateway.prompts().Render(
      "judge_extract", {{"question", std::string(question_context)},
                        {"response", std::string(raw_response)}});
  return JudgeConversation(gateway, Purpose::kJudgeExtract, std::move(prompt), sample_tag,
                           budget, cost);
}

bool JudgeEqual(std::string_view a, std::string_view b, LlmGateway* gateway,
                const std::string& sample_tag) {
  std::string na = NormalizeAnswer(a);
  std::string nb = NormalizeAnswer(b);
  if (na.empty() || nb.empty()) throw UsageError("judge_equal: empty answer");
  if (na == nb) return true;
  if (gateway == nullptr) return false;
  std::string prompt = gateway->prompts().Render("judge_equal", {{"a", na}, {"b", nb}});
  std::string verdict = ToLower(JudgeConversation(*gateway, Purpose::kJudgeEqual,
                                                  std::move(prompt), sample_tag, nullptr,
                                                  nullptr));
  if (verdict == "yes") return true;
  if (verdict == "no") return false;
  throw UnparseableError("judge_equal: expected yes or no, got '" + verdict + "'");
}

bool JudgeMentions(LlmGateway& gateway, std::string_view summary, std::string_view content,
                   const std::string& sample_tag) {
  std::string prompt = gateway.prompts().Render(
      "judge_mentions", {{"content", std::string(content)}, {"summary", std::string(summary)}});
  std::string verdict = ToLower(JudgeConversation(gateway, Purpose::kJudgeMentions,
                                                  std::move(prompt), sample_tag, nullptr,
                                                  nullptr));
  if (verdict == "yes") return true;
  if (verdict == "no") return false;
  throw UnparseableError("judge_mentions: expected yes or no, got '" + verdict + "'");
}

std::optional<std::string> AnswerTag(std::string_view text) {
  auto open = text.find("<answer>");
  if (open == std::string_view::npos) return std::nullopt;
  open += 8;
  auto close = text.find("</answer>", open);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(open, close - open));
}

std::optional<std::string> LastFencedBlock(std::string_view text, std::string* info) {
  std::optional<std::string> last;
  bool open = false;
  std::string body, current_info;
  for (const auto& line : SplitLines(text)) {
    std::string_view t = TrimLeft(line);
    if (StartsWith(t, "```")) {
      if (!open) {
        open = true;
        body.clear();
        current_info = std::string(Trim(t.substr(3)));
      } else {
        open = false;
        last = body;
        if (info) *info = current_info;
      }
      continue;
    }
    if (open) {
      body += line;
      body += '\n';
    }
  }
  return last;
}

}  // namespace fpa
