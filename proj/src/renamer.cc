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

#include "fpa/renamer.h"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "fpa/errors.h"
#include "fpa/lexer.h"
#include "fpa/text_util.h"

namespace fpa {
namespace {

const std::unordered_set<std::string_view>& PythonBuiltins() {
  static const std::unordered_set<std::string_view> kBuiltins = {
      "abs", "aiter", "all", "anext", "any", "ascii", "bin", "bool", "breakpoint",
      "bytearray", "bytes", "callable", "chr", "classmethod", "compile", "complex",
      "copyright", "credits", "delattr", "dict", "dir", "divmod", "enumerate", "eval",
      "exec", "exit", "filter", "float", "format", "frozenset", "getattr", "globals",
      "hasattr", "hash", "help", "hex", "id", "input", "int", "isinstance",
      "issubclass", "iter", "len", "license", "list", "locals", "map", "max",
      "memoryview", "min", "next", "object", "oct", "open", "ord", "pow", "print",
      "property", "quit", "range", "repr", "reversed", "round", "set", "setattr",
      "slice", "sorted", "staticmethod", "str", "sum", "super", "tuple", "type",
      "vars", "zip", "__import__", "__name__", "__file__", "__builtins__",
      "Exception", "BaseException", "ValueError", "TypeError", "KeyError",
      "IndexError", "AttributeError", "RuntimeError", "StopIteration",
      "ZeroDivisionError", "ArithmeticError", "AssertionError", "LookupError",
      "NameError", "NotImplementedError", "OSError", "OverflowError",
      "RecursionError", "NotImplemented", "Ellipsis"};
  return kBuiltins;
}

bool IsDunder(std::string_view name) {
  return name.size() > 4 && StartsWith(name, "__") && EndsWith(name, "__");
}

bool IsOpen(std::string_view t) { return t == "(" || t == "[" || t == "{"; }
bool IsClose(std::string_view t) { return t == ")" || t == "]" || t == "}"; }

bool IsAssignOp(std::string_view t) {
  return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" || t == "//=" ||
         t == "%=" || t == "**=" || t == ">>=" || t == "<<=" || t == "&=" || t == "|=" ||
         t == "^=" || t == "@=";
}

std::vector<Token> CodeTokens(std::string_view text) {
  std::vector<Token> out;
  for (auto& t : Lex(Language::kPython, text)) {
    if (t.kind != TokenKind::kComment) out.push_back(std::move(t));
  }
  return out;
}

struct Scan {
  std::vector<std::string> declared;  // first-declaration order
  std::set<std::string> declared_set;
  std::set<std::string> functions;  // def/class names
  std::set<std::string> imported;
  std::set<std::string> attributes;
  std::set<std::string> all_identifiers;

  void Declare(const std::string& name) {
    if (declared_set.insert(name).second) declared.push_back(name);
  }
};

void ScanText(std::string_view text, Scan& scan) {
  std::vector<Token> toks = CodeTokens(text);
  auto text_at = [&](std::size_t i) -> std::string_view {
    return i < toks.size() ? std::string_view(toks[i].text) : std::string_view();
  };
  auto prev_is_dot = [&](std::size_t i) { return i > 0 && toks[i - 1].text == "."; };

  bool stmt_start = true;
  int depth = 0;
  bool in_import = false;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& tok = toks[i];
    if (tok.kind == TokenKind::kNewline) {
      if (depth == 0) {
        stmt_start = true;
        in_import = false;
      }
      continue;
    }
    if (tok.kind == TokenKind::kString && tok.interpolated) {
      // Identifiers used in f-strings count as existing names.
      for (const auto& t : Lex(Language::kPython, tok.text)) {
        if (t.kind == TokenKind::kIdentifier) scan.all_identifiers.insert(t.text);
      }
    }
    bool at_start = stmt_start;
    stmt_start = false;
    if (tok.kind == TokenKind::kPunct) {
      if (IsOpen(tok.text)) ++depth;
      if (IsClose(tok.text)) depth = std::max(0, depth - 1);
      if (depth == 0 && (tok.text == ";" || tok.text == ":")) {
        // `if x: y = 1` style one-liners and `;` separated statements.
        if (tok.text == ";" || (i + 1 < toks.size() && toks[i + 1].kind != TokenKind::kNewline)) {
          stmt_start = tok.text == ";" || !in_import;
        }
      }
      continue;
    }
    if (tok.kind == TokenKind::kIdentifier) {
      scan.all_identifiers.insert(tok.text);
      if (prev_is_dot(i)) scan.attributes.insert(tok.text);
      if (in_import && !prev_is_dot(i)) scan.imported.insert(tok.text);
      if (text_at(i + 1) == ":=") scan.Declare(tok.text);
    }
    if (tok.kind != TokenKind::kKeyword) {
      if (at_start && tok.kind == TokenKind::kIdentifier) {
        // Assignment statement: find a top-level assignment operator.
        int d = 0;
        std::size_t j = i;
        std::size_t eq = toks.size();
        for (; j < toks.size(); ++j) {
          const Token& t = toks[j];
          if (t.kind == TokenKind::kNewline && d == 0) break;
          if (t.kind != TokenKind::kPunct) continue;
          if (IsOpen(t.text)) ++d;
          if (IsClose(t.text)) --d;
          if (d == 0 && (IsAssignOp(t.text) || (t.text == ":" && j == i + 1))) {
            eq = j;
            break;
          }
        }
        if (eq < toks.size()) {
          for (std::size_t k = i; k < eq; ++k) {
            if (toks[k].kind != TokenKind::kIdentifier || prev_is_dot(k)) continue;
            std::string_view nx = text_at(k + 1);
            if (nx == "," || nx == ")" || nx == ":" || k + 1 == eq) {
              scan.Declare(toks[k].text);
            }
          }
        }
      }
      continue;
    }

    // Keywords.
    const std::string& kw = tok.text;
    if (kw == "import") {
      in_import = true;
    } else if (kw == "from" && at_start) {
      // `from m import a as b`: only names after `import` are bound.
      std::size_t j = i + 1;
      while (j < toks.size() && toks[j].text != "import") ++j;
      i = j - 1;
    } else if ((kw == "def" || kw == "class") && i + 1 < toks.size() &&
               toks[i + 1].kind == TokenKind::kIdentifier) {
      scan.Declare(toks[i + 1].text);
      scan.functions.insert(toks[i + 1].text);
      scan.all_identifiers.insert(toks[i + 1].text);
      if (kw == "def" && text_at(i + 2) == "(") {
        int d = 0;
        for (std::size_t j = i + 2; j < toks.size(); ++j) {
          const Token& t = toks[j];
          if (t.kind == TokenKind::kPunct && IsOpen(t.text)) ++d;
          if (t.kind == TokenKind::kPunct && IsClose(t.text)) {
            if (--d == 0) break;
          }
          if (d == 1 && t.kind == TokenKind::kIdentifier) {
            std::string_view pv = toks[j - 1].text;
            std::string_view nx = text_at(j + 1);
            if ((pv == "(" || pv == "," || pv == "*" || pv == "**") &&
                (nx == "," || nx == ")" || nx == "=" || nx == ":")) {
              scan.Declare(t.text);
            }
          }
        }
      }
      ++i;
    } else if (kw == "lambda") {
      for (std::size_t j = i + 1; j < toks.size() && toks[j].text != ":"; ++j) {
        if (toks[j].kind == TokenKind::kIdentifier) scan.Declare(toks[j].text);
      }
    } else if (kw == "for") {
      for (std::size_t j = i + 1; j < toks.size() && toks[j].text != "in"; ++j) {
        if (toks[j].kind == TokenKind::kIdentifier && !prev_is_dot(j)) {
          scan.Declare(toks[j].text);
        }
      }
    } else if (kw == "as" && i + 1 < toks.size() &&
               toks[i + 1].kind == TokenKind::kIdentifier) {
      if (in_import) {
        scan.imported.insert(toks[i + 1].text);
      } else {
        scan.Declare(toks[i + 1].text);
      }
    }
  }
}

Scan ScanUnits(const std::vector<const CodeUnit*>& units) {
  Scan scan;
  for (const CodeUnit* u : units) {
    if (u->language != Language::kPython) {
      throw RenameError("identifier renaming is implemented for python only, not '" +
                        std::string(LanguageName(u->language)) + "'");
    }
    ScanText(u->source, scan);
    ScanText(u->prelude, scan);
    ScanText(u->invocation, scan);
  }
  return scan;
}

std::string DrawName(std::mt19937_64& rng) {
  static constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
  static constexpr std::string_view kAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string name(1, kLetters[rng() % kLetters.size()]);
  for (int i = 0; i < 7; ++i) name += kAlnum[rng() % kAlnum.size()];
  return name;
}

std::string RenameExpression(const std::string& expr, const RenameMap& map) {
  std::vector<Token> toks = Lex(Language::kPython, expr);
  std::string out;
  std::size_t last = 0;
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const Token& t = toks[k];
    if (t.kind != TokenKind::kIdentifier) continue;
    if (k > 0 && toks[k - 1].text == ".") continue;
    auto it = map.find(t.text);
    if (it == map.end()) continue;
    out += expr.substr(last, t.begin - last) + it->second;
    last = t.end;
  }
  return out + expr.substr(last);
}

// Rewrites identifiers of one f-string token.
std::string RenameFString(const std::string& literal, const RenameMap& map) {
  std::string out;
  std::size_t i = 0;
  while (i < literal.size()) {
    char c = literal[i];
    if (c == '{' && i + 1 < literal.size() && literal[i + 1] == '{') {
      out += "{{";
      i += 2;
      continue;
    }
    if (c != '{') {
      out += c;
      ++i;
      continue;
    }
    // Expression part up to the matching '}' (stopping at a top-level
    // conversion or format spec).
    std::size_t j = i + 1;
    int d = 0;
    char quote = 0;
    for (; j < literal.size(); ++j) {
      char ch = literal[j];
      if (quote) {
        if (ch == quote) quote = 0;
        continue;
      }
      if (ch == '\'' || ch == '"') {
        quote = ch;
      } else if (ch == '(' || ch == '[' || ch == '{') {
        ++d;
      } else if (ch == ')' || ch == ']' || (ch == '}' && d > 0)) {
        --d;
      } else if (d == 0 && (ch == '}' || ch == ':' || (ch == '!' && j + 1 < literal.size() &&
                                                         literal[j + 1] != '='))) {
        break;
      }
    }
    out += '{';
    out += RenameExpression(literal.substr(i + 1, j - i - 1), map);
    i = j;
    // Conversion and format spec; nested replacement fields in the spec are
    // expressions too.
    while (i < literal.size() && literal[i] != '}') {
      if (literal[i] == '{') {
        std::size_t close = literal.find('}', i);
        if (close == std::string::npos) break;
        out += '{' + RenameExpression(literal.substr(i + 1, close - i - 1), map) + '}';
        i = close + 1;
        continue;
      }
      out += literal[i++];
    }
    if (i < literal.size()) out += literal[i++];
  }
  return out;
}

std::string RenameText(const std::string& text, const RenameMap& map,
                       const std::set<std::string>& renamed_callees) {
  if (map.empty() || text.empty()) return text;
  std::vector<Token> toks = CodeTokens(text);
  // Callee of each open paren (empty when not a call).
  std::vector<std::string> callee_stack;
  std::string out;
  std::size_t last = 0;
  auto replace = [&](const Token& t, const std::string& with) {
    out += text.substr(last, t.begin - last);
    out += with;
    last = t.end;
  };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind == TokenKind::kPunct) {
      if (IsOpen(t.text)) {
        std::string callee;
        if (t.text == "(" && i > 0 && toks[i - 1].kind == TokenKind::kIdentifier) {
          callee = toks[i - 1].text;
        }
        callee_stack.push_back(callee);
      } else if (IsClose(t.text) && !callee_stack.empty()) {
        callee_stack.pop_back();
      }
      continue;
    }
    if (t.kind == TokenKind::kString && t.interpolated) {
      std::string renamed = RenameFString(t.text, map);
      if (renamed != t.text) replace(t, renamed);
      continue;
    }
    if (t.kind != TokenKind::kIdentifier) continue;
    if (i > 0 && toks[i - 1].text == ".") continue;
    auto it = map.find(t.text);
    if (it == map.end()) continue;
    bool keyword_arg = i + 1 < toks.size() && toks[i + 1].text == "=" && i > 0 &&
                       (toks[i - 1].text == "(" || toks[i - 1].text == ",") &&
                       !callee_stack.empty() && toks[i - 1].kind == TokenKind::kPunct;
    if (keyword_arg && !callee_stack.back().empty() &&
        !renamed_callees.count(callee_stack.back())) {
      // Keyword argument of a call whose callee we do not own.
      continue;
    }
    replace(t, it->second);
  }
  out += text.substr(last);
  return out;
}

}  // namespace

std::vector<std::string> DeclaredIdentifiers(const std::vector<const CodeUnit*>& units) {
  Scan scan = ScanUnits(units);
  std::vector<std::string> out;
  for (const auto& name : scan.declared) {
    if (name == "_" || IsDunder(name) || scan.attributes.count(name)) continue;
    if (PythonBuiltins().count(name)) {
      throw RenameError("declaration of '" + name +
                        "' shadows a builtin; refusing to rename ambiguous code");
    }
    if (scan.imported.count(name)) {
      throw RenameError("'" + name + "' is both imported and assigned; refusing to rename");
    }
    out.push_back(name);
  }
  return out;
}

RenameMap PlanRenaming(const std::vector<const CodeUnit*>& units, std::uint64_t seed) {
  std::vector<std::string> names = DeclaredIdentifiers(units);
  Scan scan = ScanUnits(units);
  std::set<std::string> taken = scan.all_identifiers;
  std::mt19937_64 rng(seed);
  RenameMap map;
  for (const auto& name : names) {
    std::string fresh;
    do {
      fresh = DrawName(rng);
    } while (taken.count(fresh) || IsKeyword(Language::kPython, fresh) ||
             PythonBuiltins().count(fresh));
    taken.insert(fresh);
    map[name] = fresh;
  }
  return map;
}

CodeUnit ApplyRenaming(const CodeUnit& unit, const RenameMap& map) {
  if (unit.language != Language::kPython) {
    throw RenameError("identifier renaming is implemented for python only");
  }
  std::set<std::string> owned;
  {
    Scan scan;
    ScanText(unit.source, scan);
    for (const auto& f : scan.functions) {
      if (map.count(f)) owned.insert(f);
    }
  }
  CodeUnit out = unit;
  out.source = RenameText(unit.source, map, owned);
  out.prelude = RenameText(unit.prelude, map, owned);
  out.invocation = RenameText(unit.invocation, map, owned);
  return out;
}

CodeUnit RandomizeIdentifiers(const CodeUnit& unit, std::uint64_t seed) {
  return ApplyRenaming(unit, PlanRenaming({&unit}, seed));
}

DeceptionPatternRecord RandomizeRecordIdentifiers(const DeceptionPatternRecord& record,
                                                  std::uint64_t seed) {
  RenameMap map = PlanRenaming({&record.familiar, &record.deceptive}, seed);
  DeceptionPatternRecord out = record;
  out.familiar = ApplyRenaming(record.familiar, map);
  out.deceptive = ApplyRenaming(record.deceptive, map);
  return out;
}

}  // namespace fpa
