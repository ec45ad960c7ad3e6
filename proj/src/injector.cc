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

#include "fpa/injector.h"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "fpa/errors.h"
#include "fpa/lexer.h"
#include "fpa/text_util.h"

namespace fpa {
namespace {

bool IsInteger(std::string_view v) {
  static const std::regex kInt(R"(-?[0-9]+)");
  return std::regex_match(v.begin(), v.end(), kInt);
}

bool IsDecimal(std::string_view v) {
  static const std::regex kDec(R"(-?[0-9]+\.[0-9]+([eE][-+]?[0-9]+)?)");
  return std::regex_match(v.begin(), v.end(), kDec);
}

std::string Quote(std::string_view v) {
  std::string out = "\"";
  for (char c : v) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  return out + "\"";
}

std::string Indent(std::string_view block, std::string_view indent) {
  std::string out;
  for (const auto& line : SplitLines(block)) {
    if (!out.empty()) out += '\n';
    if (!Trim(line).empty()) out += std::string(indent) + line;
  }
  return out;
}

std::string_view IndentUnit(Language language) {
  return language == Language::kGo ? "\t" : "    ";
}

// Names of functions and types declared by `source`.
std::set<std::string> DeclaredNames(Language language, std::string_view source) {
  std::vector<Token> toks = SignificantTokens(language, source);
  std::set<std::string> names;
  int depth = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& tok = toks[i];
    const Token* next = i + 1 < toks.size() ? &toks[i + 1] : nullptr;
    if (tok.kind == TokenKind::kPunct) {
      if (tok.text == "{") ++depth;
      if (tok.text == "}") --depth;
      continue;
    }
    if (!next) continue;
    if (tok.kind == TokenKind::kKeyword) {
      bool decl = false;
      switch (language) {
        case Language::kPython:
          decl = tok.text == "def" || tok.text == "class";
          break;
        case Language::kRust:
          decl = tok.text == "fn" || tok.text == "struct" || tok.text == "enum";
          break;
        case Language::kGo:
          decl = tok.text == "func" || tok.text == "type";
          break;
        case Language::kJavaScript:
          decl = tok.text == "function" || tok.text == "class";
          break;
        default:
          break;
      }
      if (decl && next->kind == TokenKind::kIdentifier) names.insert(next->text);
      continue;
    }
    if (language == Language::kC && depth == 0 && tok.kind == TokenKind::kIdentifier &&
        next->text == "(" && i > 0 &&
        (toks[i - 1].kind != TokenKind::kPunct || toks[i - 1].text == "*")) {
      names.insert(tok.text);
    }
  }
  return names;
}

std::string Condition(Language language, const std::string& invocation,
                      const std::string& literal, bool string_value) {
  switch (language) {
    case Language::kC:
      if (string_value) return "strcmp(" + invocation + ", " + literal + ") == 0";
      return invocation + " == " + literal;
    case Language::kJavaScript:
      return invocation + " === " + literal;
    default:
      return invocation + " == " + literal;
  }
}

std::string GuardStatement(Language language, const std::string& condition,
                           const std::string& body) {
  std::string_view ind = IndentUnit(language);
  switch (language) {
    case Language::kPython:
      return "if " + condition + ":\n" + Indent(body.empty() ? "pass" : body, ind) + "\n";
    case Language::kC:
    case Language::kJavaScript:
      return "if (" + condition + ") {\n" + (body.empty() ? "" : Indent(body, ind) + "\n") +
             "}\n";
    case Language::kRust:
    case Language::kGo:
      return "if " + condition + " {\n" + (body.empty() ? "" : Indent(body, ind) + "\n") +
             "}\n";
    case Language::kHtml:
      break;
  }
  throw InjectionError("no guard syntax for language '" +
                       std::string(LanguageName(language)) + "'");
}

bool IsStringLiteral(Language language, std::string_view value) {
  if (language == Language::kPython) {
    return value != "True" && value != "False" && value != "None" && !IsInteger(value) &&
           !IsDecimal(value) && !StartsWith(value, "[") && !StartsWith(value, "(") &&
           !StartsWith(value, "{");
  }
  return value != "true" && value != "false" && !IsInteger(value) && !IsDecimal(value);
}

Guard MakeGuard(const DeceptionPatternRecord& pattern, const CodeUnit& variant,
                Strategy strategy, const TargetBehavior& behavior) {
  Language lang = variant.language;
  if (!IsExecutable(lang)) {
    throw InjectionError("no guard syntax for language '" +
                         std::string(LanguageName(lang)) + "'");
  }
  bool control = strategy == Strategy::kControl;
  if (!control && Trim(behavior.code).empty()) {
    throw InjectionError("target behavior t is required for strategy '" +
                         std::string(StrategyName(strategy)) + "'");
  }
  const std::string& compared =
      strategy == Strategy::kHideLogic ? pattern.actual_value : pattern.familiar_value;
  std::string literal = ValueLiteral(lang, compared);
  Guard g;
  g.language = lang;
  g.pattern_id = pattern.id;
  g.definition = variant.source;
  g.text = GuardStatement(
      lang, Condition(lang, variant.invocation, literal, IsStringLiteral(lang, compared)),
      control ? std::string() : behavior.code);
  return g;
}

// Line (1-based) where `needle` starts inside `text`, or 0.
int LineOf(const std::string& text, const std::string& needle) {
  auto pos = text.find(needle);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

}  // namespace

std::string_view StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kInjectPhantom:
      return "inject_phantom";
    case Strategy::kHideLogic:
      return "hide_logic";
    case Strategy::kControl:
      return "control";
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "inject_phantom") return Strategy::kInjectPhantom;
  if (name == "hide_logic") return Strategy::kHideLogic;
  if (name == "control") return Strategy::kControl;
  throw UsageError("unknown strategy '" + std::string(name) +
                   "' (expected inject_phantom, hide_logic or control)");
}

TargetBehavior SentinelBehavior(Language language, std::string_view token) {
  std::string q = Quote(token);
  TargetBehavior b;
  b.observable_effect = "prints " + std::string(token) + " on its own line before the result";
  switch (language) {
    case Language::kPython:
      b.code = "print(" + q + ")";
      break;
    case Language::kC:
      b.code = "puts(" + q + ");";
      break;
    case Language::kRust:
      b.code = "println!(" + q + ");";
      break;
    case Language::kGo:
      b.code = "fmt.Println(" + q + ")";
      break;
    case Language::kJavaScript:
      b.code = "console.log(" + q + ");";
      break;
    case Language::kHtml:
      throw InjectionError("no target behavior for html");
  }
  return b;
}

TargetBehavior DefaultBehavior(Language language, Strategy strategy) {
  switch (strategy) {
    case Strategy::kInjectPhantom:
      return SentinelBehavior(language, "SAFE");
    case Strategy::kHideLogic:
      return SentinelBehavior(language, "HIDDEN");
    case Strategy::kControl:
      return {};
  }
  return {};
}

std::string ValueLiteral(Language language, std::string_view value) {
  if (language == Language::kPython) {
    if (value == "True" || value == "False" || value == "None" || IsInteger(value) ||
        IsDecimal(value)) {
      return std::string(value);
    }
    if (StartsWith(value, "[") || StartsWith(value, "(") || StartsWith(value, "{")) {
      return std::string(value);
    }
    return Quote(value);
  }
  if (value == "true" || value == "false" || IsInteger(value) || IsDecimal(value)) {
    return std::string(value);
  }
  if (value.find('\n') != std::string_view::npos ||
      (language != Language::kJavaScript &&
       (StartsWith(value, "[") || StartsWith(value, "{")))) {
    throw InjectionError("value '" + std::string(value) + "' has no " +
                         std::string(LanguageName(language)) + " literal form");
  }
  return Quote(value);
}

Guard BuildGuard(const DeceptionPatternRecord& pattern, Strategy strategy,
                 const TargetBehavior& behavior) {
  return MakeGuard(pattern, strategy == Strategy::kControl ? pattern.familiar : pattern.deceptive,
                   strategy, behavior);
}

Guard BuildUnperturbedGuard(const DeceptionPatternRecord& pattern, Strategy strategy,
                            const TargetBehavior& behavior) {
  return MakeGuard(pattern, pattern.familiar, strategy, behavior);
}

CodeUnit Inject(const TargetProgram& x, const Guard& guard, const ExecOracle* oracle) {
  if (guard.language != x.unit.language) {
    throw InjectionError("guard language '" + std::string(LanguageName(guard.language)) +
                         "' does not match target language '" +
                         std::string(LanguageName(x.unit.language)) + "'");
  }
  std::set<std::string> pattern_names = DeclaredNames(guard.language, guard.definition);
  std::set<std::string> target_names = DeclaredNames(x.unit.language, x.unit.source);
  for (const auto& name : pattern_names) {
    if (target_names.count(name)) {
      throw InjectionError("pattern '" + guard.pattern_id + "' and target '" + x.id +
                           "' both declare '" + name + "'");
    }
  }
  CodeUnit out = x.unit;
  std::string definition = guard.definition;
  if (!definition.empty() && definition.back() != '\n') definition += '\n';
  out.source = definition + "\n" + x.unit.source;
  std::string prelude = x.unit.prelude;
  if (!prelude.empty() && prelude.back() != '\n') prelude += '\n';
  out.prelude = prelude + guard.text;
  if (oracle) {
    ExecResult r = oracle->CheckSyntax(out.language, AssembleProgram(out));
    if (r.status == ExecStatus::kCompileError) {
      throw InjectionError("composed program for target '" + x.id + "' does not " +
                           (out.language == Language::kPython ? "parse" : "compile") +
                           ":\n" + r.stderr_text);
    }
    if (!r.ok()) {
      throw InjectionError("syntax check of composed program failed: " + r.Describe());
    }
  }
  return out;
}

AttackSample ComposeAttack(const TargetProgram& x, const DeceptionPatternRecord& pattern,
                           Strategy strategy, const TargetBehavior& behavior,
                           const ExecOracle& oracle) {
  AttackSample s;
  s.target = x;
  s.pattern = pattern;
  s.behavior = strategy == Strategy::kControl ? TargetBehavior{} : behavior;
  s.strategy = strategy;
  Guard g = BuildGuard(pattern, strategy, s.behavior);
  s.composed = Inject(x, g, &oracle);
  std::string first_line(Trim(SplitLines(g.text).front()));
  int line = LineOf(AssembleProgram(s.composed), first_line);
  s.guard_site = "entry point before final output, line " + std::to_string(line);
  return s;
}

std::string ComposedFileName(const AttackSample& sample) {
  return sample.target.id + "__" + sample.pattern.id + "__" +
         std::string(StrategyName(sample.strategy)) + "." +
         std::string(SourceExtension(sample.composed.language));
}

CodeUnit IntendedProgram(const AttackSample& sample) {
  CodeUnit unit = sample.target.unit;
  if (sample.strategy == Strategy::kHideLogic) {
    if (!unit.prelude.empty() && unit.prelude.back() != '\n') unit.prelude += '\n';
    unit.prelude += sample.behavior.code + "\n";
  }
  return unit;
}

RuntimeCheck CheckRuntime(const AttackSample& sample, const ExecOracle& oracle,
                          const ExecLimits& limits) {
  RuntimeCheck check;
  ExecResult intended = oracle.ExecuteMemoized(IntendedProgram(sample), limits);
  ExecResult composed = oracle.ExecuteMemoized(sample.composed, limits);
  if (!intended.ok()) check.diagnostics.push_back("intended program: " + intended.Describe());
  if (!composed.ok()) check.diagnostics.push_back("composed program: " + composed.Describe());
  check.intended_output = intended.stdout_normalized;
  check.composed_output = composed.stdout_normalized;
  if (intended.ok() && composed.ok()) check.preserved = Equivalent(intended, composed);

  if (sample.strategy == Strategy::kControl) {
    check.pattern_matters = true;
    check.unperturbed_output = check.composed_output;
    return check;
  }
  CodeUnit unperturbed = Inject(
      sample.target, BuildUnperturbedGuard(sample.pattern, sample.strategy, sample.behavior));
  ExecResult u = oracle.ExecuteMemoized(unperturbed, limits);
  check.unperturbed_output = u.stdout_normalized;
  if (!u.ok()) {
    check.diagnostics.push_back("unperturbed composition: " + u.Describe());
  } else if (composed.ok()) {
    check.pattern_matters = !Equivalent(u, composed);
  }
  return check;
}

}  // namespace fpa
