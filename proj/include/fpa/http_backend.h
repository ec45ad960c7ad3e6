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

#ifndef FPA_HTTP_BACKEND_H_
#define FPA_HTTP_BACKEND_H_

#include <memory>
#include <string>

#include "json.hpp"

#include "fpa/llm_gateway.h"

namespace fpa {

// Chat-completion client for the OpenAI, Anthropic and Gemini HTTP APIs. The
// API key is read from config.credentials_env at call time.
std::unique_ptr<Backend> MakeHttpBackend(const ProviderConfig& config);

// Request body and path for one vendor; exposed for tests.
struct HttpCall {
  std::string path;
  nlohmann::json body;
  // Header name and value carrying the key; empty name means a query key.
  std::string auth_header;
  std::string auth_value;
};
HttpCall BuildHttpCall(const ProviderConfig& config, const CompletionRequest& request,
                       const std::string& api_key);
// Throws MalformedResponseError when the body lacks the expected fields.
Completion ParseHttpResponse(ProviderKind kind, const std::string& body);

}  // namespace fpa

#endif  // FPA_HTTP_BACKEND_H_
