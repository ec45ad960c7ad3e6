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

#include "fpa/code_unit.h"

#include <algorithm>
#include <sstream>
#include <vector>

#include "fpa/errors.h"
#include "fpa/text_util.h"

namespace fpa {
namespace {

constexpr std::string_view kCPrintHelpers = R"c(static void fpa_print_bool(bool v) { puts(v ? "true" : "false"); }
static void fpa_print_char(char v) { printf("%c\n", v); }
static void fpa_print_int(long long v) { printf("%lld\n", v); }
static void fpa_print_uint(unsigned long long v) { printf("%llu\n", v); }
static void fpa_print_double(double v) { printf("%g\n", v); }
static void fpa_print_str(const char *v) { puts(v ? v : "(null)"); }
#define FPA_PRINT(x) _Generic((x), \
    bool: fpa_print_bool, char: fpa_print_char, \
    signed char: fpa_print_int, unsigned char: fpa_print_uint, \
    short: fpa_print_int, unsigned short: fpa_print_uint, \
    int: fpa_print_int, unsigned int: fpa_print_uint, \
    long: fpa_print_int, unsigned long: fpa_print_uint, \
    long long: fpa_print_int, unsigned long long: fpa_print_uint, \
    float: fpa_print_double, double: fpa_print_double, \
    char *: fpa_print_str, const char *: fpa_print_str)(x)
)c";

void AppendUnique(std::vector<std::string>& lines, const std::string& line) {
  if (std::find(lines.begin(), lines.end(), line) == lines.end()) {
    lines.push_back(line);
  }
}

// Splits `source` into hoisted header lines (matching `is_header`) and the
// remaining body. Header lines are deduplicated.
void SplitHeaders(std::string_view source, bool (*is_header)(std::string_view),
                  std::vector<std::string>& headers, std::string& body) {
  for (const auto& line : SplitLines(source)) {
    if (is_header(line)) {
      AppendUnique(headers, std::string(TrimRight(line)));
    } else {
      body += line;
      body += '\n';
    }
  }
}

bool IsCInclude(std::string_view line) {
  return StartsWith(TrimLeft(line), "#include");
}

bool IsRustUse(std::string_view line) {
  return StartsWith(line, "use ") || StartsWith(line, "extern crate ");
}

std::string IndentBlock(std::string_view block, std::string_view indent) {
  std::string out;
  for (const auto& line : SplitLines(block)) {
    if (!TrimRight(line).empty()) {
      out += indent;
      out += line;
    }
    out += '\n';
  }
  return out;
}

// Collects Go import paths (single-line and parenthesized forms) and drops
// any package clause.
void SplitGoHeaders(std::string_view source, std::vector<std::string>& imports,
                    std::string& body) {
  bool in_block = false;
  for (const auto& line : SplitLines(source)) {
    std::string_view trimmed = Trim(line);
    if (in_block) {
      if (trimmed == ")") {
        in_block = false;
      } else if (!trimmed.empty()) {
        AppendUnique(imports, std::string(trimmed));
      }
      continue;
    }
    if (StartsWith(line, "package ")) continue;
    if (StartsWith(line, "import (")) {
      in_block = true;
      continue;
    }
    if (StartsWith(line, "import ")) {
      AppendUnique(imports, std::string(Trim(trimmed.substr(7))));
      continue;
    }
    body += line;
    body += '\n';
  }
}

std::string AssemblePython(const CodeUnit& unit) {
  std::string out = unit.source;
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += '\n';
  if (!unit.prelude.empty()) {
    out += unit.prelude;
    if (out.back() != '\n') out += '\n';
  }
  out += "print(" + unit.invocation + ")\n";
  return out;
}

std::string AssembleC(const CodeUnit& unit) {
  std::vector<std::string> headers = {"#include <stdbool.h>",
                                      "#include <stdio.h>",
                                      "#include <stdlib.h>",
                                      "#include <string.h>"};
  std::string body;
  SplitHeaders(unit.source, IsCInclude, headers, body);
  std::string out;
  for (const auto& h : headers) out += h + "\n";
  out += "\n";
  out += kCPrintHelpers;
  out += "\n";
  out += body;
  out += "\nint main(void) {\n";
  out += IndentBlock(unit.prelude, "    ");
  out += "    FPA_PRINT(" + unit.invocation + ");\n";
  out += "    return 0;\n}\n";
  return out;
}

std::string AssembleRust(const CodeUnit& unit) {
  std::vector<std::string> headers;
  std::string body;
  SplitHeaders(unit.source, IsRustUse, headers, body);
  std::string out;
  for (const auto& h : headers) out += h + "\n";
  if (!headers.empty()) out += "\n";
  out += body;
  out += "\nfn main() {\n";
  out += IndentBlock(unit.prelude, "    ");
  out += "    println!(\"{}\", " + unit.invocation + ");\n}\n";
  return out;
}

std::string AssembleGo(const CodeUnit& unit) {
  std::vector<std::string> imports = {"\"fmt\""};
  std::string body;
  SplitGoHeaders(unit.source, imports, body);
  std::string out = "package main\n\nimport (\n";
  for (const auto& imp : imports) out += "\t" + imp + "\n";
  out += ")\n\n";
  out += body;
  out += "\nfunc main() {\n";
  out += IndentBlock(unit.prelude, "\t");
  out += "\tfmt.Println(" + unit.invocation + ")\n}\n";
  return out;
}

std::string AssembleJavaScript(const CodeUnit& unit) {
  std::string out = unit.source;
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += '\n';
  if (!unit.prelude.empty()) {
    out += unit.prelude;
    if (out.back() != '\n') out += '\n';
  }
  out += "console.log(String(" + unit.invocation + "));\n";
  return out;
}

}  // namespace

std::string DefinitionBody(Language language, std::string_view source) {
  std::vector<std::string> headers;
  std::string body;
  switch (language) {
    case Language::kC:
      SplitHeaders(source, IsCInclude, headers, body);
      return body;
    case Language::kRust:
      SplitHeaders(source, IsRustUse, headers, body);
      return body;
    case Language::kGo:
      SplitGoHeaders(source, headers, body);
      return body;
    default:
      return std::string(source);
  }
}

std::string_view LanguageName(Language language) {
  switch (language) {
    case Language::kPython:
      return "python";
    case Language::kC:
      return "c";
    case Language::kRust:
      return "rust";
    case Language::kGo:
      return "go";
    case Language::kJavaScript:
      return "javascript";
    case Language::kHtml:
      return "html";
  }
  return "unknown";
}

Language ParseLanguage(std::string_view name) {
  for (Language l : {Language::kPython, Language::kC, Language::kRust,
                     Language::kGo, Language::kJavaScript, Language::kHtml}) {
    if (LanguageName(l) == name) return l;
  }
  throw ValidationError("unsupported language '" + std::string(name) + "'");
}

std::string_view SourceExtension(Language language) {
  switch (language) {
    case Language::kPython:
      return "py";
    case Language::kC:
      return "c";
    case Language::kRust:
      return "rs";
    case Language::kGo:
      return "go";
    case Language::kJavaScript:
      return "js";
    case Language::kHtml:
      return "html";
  }
  return "txt";
}

bool IsExecutable(Language language) { return language != Language::kHtml; }

void CheckCodeUnit(const CodeUnit& unit) {
  if (Trim(unit.source).empty()) {
    throw ValidationError("code unit source is empty");
  }
  if (IsExecutable(unit.language) && Trim(unit.invocation).empty()) {
    throw ValidationError("code unit invocation is empty for executable " +
                          std::string(LanguageName(unit.language)) + " unit");
  }
}

std::string NormalizeOutput(std::string_view raw) {
  std::string unified;
  unified.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r') {
      unified += '\n';
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
    } else {
      unified += raw[i];
    }
  }
  std::string out;
  out.reserve(unified.size());
  for (const auto& line : SplitLines(unified)) {
    out += TrimRight(line);
    out += '\n';
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ' ||
                          out.back() == '\t')) {
    out.pop_back();
  }
  return out;
}

std::string AssembleProgram(const CodeUnit& unit) {
  CheckCodeUnit(unit);
  switch (unit.language) {
    case Language::kPython:
      return AssemblePython(unit);
    case Language::kC:
      return AssembleC(unit);
    case Language::kRust:
      return AssembleRust(unit);
    case Language::kGo:
      return AssembleGo(unit);
    case Language::kJavaScript:
      return AssembleJavaScript(unit);
    case Language::kHtml:
      break;
  }
  throw ValidationError("language '" + std::string(LanguageName(unit.language)) +
                        "' has no executable program form");
}

}  // namespace fpa
