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

#ifndef FPA_PROMPTS_H_
#define FPA_PROMPTS_H_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fpa {

// Named prompt templates with `{{var}}` placeholders. The built-in set is
// compiled from prompts/*.txt; a directory of .txt files overrides entries
// by name.
class PromptLibrary {
 public:
  static const PromptLibrary& Builtin();
  // Built-in templates overridden by every `<name>.txt` in `dir`.
  static PromptLibrary WithOverrides(const std::filesystem::path& dir);

  // Throws UsageError for unknown names.
  const std::string& Get(const std::string& name) const;
  std::string Render(const std::string& name,
                     const std::vector<std::pair<std::string, std::string>>& vars) const;
  // First 16 hex digits of the template's SHA-256; recorded in manifests.
  std::string Hash(const std::string& name) const;
  std::map<std::string, std::string> Hashes() const;

 private:
  std::map<std::string, std::string> templates_;
};

}  // namespace fpa

#endif  // FPA_PROMPTS_H_
