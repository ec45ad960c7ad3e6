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

#ifndef FPA_TEXT_UTIL_H_
#define FPA_TEXT_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fpa {

// Lines without their terminators. A trailing newline does not produce an
// extra empty line.
std::vector<std::string> SplitLines(std::string_view text);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view Trim(std::string_view s);
std::string_view TrimLeft(std::string_view s);
std::string_view TrimRight(std::string_view s);
bool StartsWith(std::string_view s, std::string_view prefix);
bool EndsWith(std::string_view s, std::string_view suffix);
std::string ToLower(std::string_view s);
std::string ReplaceAll(std::string s, std::string_view from, std::string_view to);
bool ContainsIgnoreCase(std::string_view haystack, std::string_view needle);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::string_view data);

// Replaces every `{{name}}` with vars[name]. Unknown placeholders are left
// untouched.
std::string RenderTemplate(
    std::string_view tpl,
    const std::vector<std::pair<std::string, std::string>>& vars);

// Line-level diff ("- old" / "+ new" lines) between two texts, computed from
// the longest common subsequence of lines.
std::string LineDiff(std::string_view before, std::string_view after);

}  // namespace fpa

#endif  // FPA_TEXT_UTIL_H_
