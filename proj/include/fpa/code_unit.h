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

#ifndef FPA_CODE_UNIT_H_
#define FPA_CODE_UNIT_H_

#include <optional>
#include <string>
#include <string_view>

namespace fpa {

enum class Language { kPython, kC, kRust, kGo, kJavaScript, kHtml };

// "python", "c", "rust", "go", "javascript", "html".
std::string_view LanguageName(Language language);
// Inverse of LanguageName; throws ValidationError on unknown names.
Language ParseLanguage(std::string_view name);
// File extension without the dot ("py", "c", "rs", "go", "js", "html").
std::string_view SourceExtension(Language language);
bool IsExecutable(Language language);

// A source text plus the expression whose printed value is the observable
// output. Executable units are turned into standalone programs by
// AssembleProgram: definitions first, then an entry point that runs
// `prelude` and prints `invocation`.
struct CodeUnit {
  Language language = Language::kPython;
  std::string source;
  std::string invocation;
  std::optional<std::string> entry_hint;
  // Statements executed in the entry point right before the final output
  // statement. Empty for plain units; the injector places guards here.
  std::string prelude;

  bool operator==(const CodeUnit&) const = default;
};

// Throws ValidationError when the CodeUnit invariants do not hold.
void CheckCodeUnit(const CodeUnit& unit);

// Unified newlines, trailing whitespace stripped from every line and from
// the end of the text.
std::string NormalizeOutput(std::string_view raw);

// Renders the standalone program for `unit`. Throws ValidationError for
// non-executable languages.
std::string AssembleProgram(const CodeUnit& unit);

// `source` without the lines AssembleProgram hoists to the top of the
// program (C includes, Rust uses, Go package and import clauses).
std::string DefinitionBody(Language language, std::string_view source);

}  // namespace fpa

#endif  // FPA_CODE_UNIT_H_
