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

#include "fpa/prompts.h"

#include "fpa/errors.h"
#include "fpa/prompts_embedded.h"
#include "fpa/text_util.h"

namespace fpa {

namespace {

// Template files end with a newline that is not part of the prompt.
std::string StripFinalNewline(std::string text) {
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

}  // namespace

const PromptLibrary& PromptLibrary::Builtin() {
  static const PromptLibrary lib = [] {
    PromptLibrary l;
    for (const auto& [name, text] : embedded::kPrompts) {
      l.templates_[std::string(name)] = StripFinalNewline(std::string(text));
    }
    return l;
  }();
  return lib;
}

PromptLibrary PromptLibrary::WithOverrides(const std::filesystem::path& dir) {
  PromptLibrary lib = Builtin();
  if (!std::filesystem::is_directory(dir)) {
    throw UsageError("prompt directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".txt") {
      lib.templates_[entry.path().stem().string()] = StripFinalNewline(ReadFile(entry.path()));
    }
  }
  return lib;
}

const std::string& PromptLibrary::Get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw UsageError("unknown prompt template '" + name + "'");
  return it->second;
}

std::string PromptLibrary::Render(
    const std::string& name,
    const std::vector<std::pair<std::string, std::string>>& vars) const {
  return RenderTemplate(Get(name), vars);
}

std::string PromptLibrary::Hash(const std::string& name) const {
  return Sha256Hex(Get(name)).substr(0, 16);
}

std::map<std::string, std::string> PromptLibrary::Hashes() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, text] : templates_) out[name] = Sha256Hex(text).substr(0, 16);
  return out;
}

}  // namespace fpa
