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

#include "fpa/http_backend.h"

#include <cstdlib>

#include "httplib.h"

#include "fpa/errors.h"
#include "fpa/text_util.h"

namespace fpa {

using nlohmann::json;

namespace {

// Splits "https://host:port/prefix" into the scheme-host part and a path
// prefix.
std::pair<std::string, std::string> SplitEndpoint(const std::string& endpoint) {
  auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw UsageError("endpoint '" + endpoint + "' is not an http(s) URL");
  }
  auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, slash), prefix};
}

std::string SystemText(const CompletionRequest& request) {
  std::string out;
  for (const auto& m : request.messages) {
    if (m.role != "system") continue;
    if (!out.empty()) out += "\n\n";
    out += m.content;
  }
  return out;
}

class HttpBackend : public Backend {
 public:
  bool remote() const override { return true; }

  Completion Complete(const ProviderConfig& config,
                      const CompletionRequest& request) override {
    const char* key = std::getenv(config.credentials_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw AuthError("credentials variable " + config.credentials_env + " is not set");
    }
    HttpCall call = BuildHttpCall(config, request, key);
    auto [base, prefix] = SplitEndpoint(config.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);
    httplib::Headers headers;
    if (!call.auth_header.empty()) headers.emplace(call.auth_header, call.auth_value);
    if (config.kind == ProviderKind::kAnthropic) {
      headers.emplace("anthropic-version", "2023-06-01");
    }
    auto res = client.Post(prefix + call.path, headers, call.body.dump(), "application/json");
    if (!res) {
      throw TransientError("request to " + config.endpoint + " failed: " +
                           httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      throw AuthError("provider '" + config.id + "' rejected the credentials (HTTP " +
                      std::to_string(status) + ")");
    }
    if (status == 429) throw RateLimitError("HTTP 429 from " + config.endpoint);
    if (status >= 500 || status == 408) {
      throw TransientError("HTTP " + std::to_string(status) + " from " + config.endpoint);
    }
    if (status != 200) {
      throw ProviderError("HTTP " + std::to_string(status) + " from " + config.endpoint +
                          ": " + res->body.substr(0, 300));
    }
    return ParseHttpResponse(config.kind, res->body);
  }
};

}  // namespace

HttpCall BuildHttpCall(const ProviderConfig& config, const CompletionRequest& request,
                       const std::string& api_key) {
  HttpCall call;
  switch (config.kind) {
    case ProviderKind::kOpenAi: {
      json messages = json::array();
      for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
      }
      call.path = "/v1/chat/completions";
      call.body = {{"model", config.model_name}, {"messages", messages}};
      if (config.temperature) call.body["temperature"] = *config.temperature;
      call.auth_header = "Authorization";
      call.auth_value = "Bearer " + api_key;
      break;
    }
    case ProviderKind::kAnthropic: {
      json messages = json::array();
      for (const auto& m : request.messages) {
        if (m.role == "system") continue;
        messages.push_back({{"role", m.role}, {"content", m.content}});
      }
      call.path = "/v1/messages";
      call.body = {{"model", config.model_name}, {"max_tokens", 4096},
                   {"messages", messages}};
      std::string system = SystemText(request);
      if (!system.empty()) call.body["system"] = system;
      if (config.temperature) call.body["temperature"] = *config.temperature;
      call.auth_header = "x-api-key";
      call.auth_value = api_key;
      break;
    }
    case ProviderKind::kGemini: {
      json contents = json::array();
      for (const auto& m : request.messages) {
        if (m.role == "system") continue;
        contents.push_back({{"role", m.role == "assistant" ? "model" : "user"},
                            {"parts", json::array({{{"text", m.content}}})}});
      }
      call.path = "/v1beta/models/" + config.model_name + ":generateContent";
      call.body = {{"contents", contents}};
      std::string system = SystemText(request);
      if (!system.empty()) {
        call.body["systemInstruction"] = {{"parts", json::array({{{"text", system}}})}};
      }
      if (config.temperature) {
        call.body["generationConfig"] = {{"temperature", *config.temperature}};
      }
      call.auth_header = "x-goog-api-key";
      call.auth_value = api_key;
      break;
    }
    case ProviderKind::kScripted:
      throw UsageError("scripted providers have no HTTP form");
  }
  return call;
}

Completion ParseHttpResponse(ProviderKind kind, const std::string& body) {
  Completion c;
  try {
    json j = json::parse(body);
    switch (kind) {
      case ProviderKind::kOpenAi:
        c.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        c.input_tokens = j.at("usage").at("prompt_tokens").get<long>();
        c.output_tokens = j.at("usage").at("completion_tokens").get<long>();
        break;
      case ProviderKind::kAnthropic:
        for (const auto& part : j.at("content")) {
          if (part.value("type", "") == "text") c.text += part.at("text").get<std::string>();
        }
        c.input_tokens = j.at("usage").at("input_tokens").get<long>();
        c.output_tokens = j.at("usage").at("output_tokens").get<long>();
        break;
      case ProviderKind::kGemini:
        for (const auto& part : j.at("candidates").at(0).at("content").at("parts")) {
          c.text += part.value("text", "");
        }
        c.input_tokens = j.at("usageMetadata").value("promptTokenCount", 0L);
        c.output_tokens = j.at("usageMetadata").value("candidatesTokenCount", 0L);
        break;
      case ProviderKind::kScripted:
        throw UsageError("scripted providers have no HTTP form");
    }
  } catch (const json::exception& e) {
    throw MalformedResponseError(std::string("unexpected response body: ") + e.what());
  }
  return c;
}

std::unique_ptr<Backend> MakeHttpBackend(const ProviderConfig& config) {
  if (!config.remote()) throw UsageError("provider '" + config.id + "' is not remote");
  SplitEndpoint(config.endpoint);
  return std::make_unique<HttpBackend>();
}

}  // namespace fpa
