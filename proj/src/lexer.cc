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

#include "fpa/lexer.h"

#include <array>
#include <cctype>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

#include "fpa/errors.h"

namespace fpa {
namespace {

const std::unordered_set<std::string_view>& KeywordSet(Language language) {
  static const std::unordered_set<std::string_view> kPython = {
      "False", "None",   "True",    "and",      "as",       "assert", "async",
      "await", "break",  "class",   "continue", "def",      "del",    "elif",
      "else",  "except", "finally", "for",      "from",     "global", "if",
      "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
      "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"};
  static const std::unordered_set<std::string_view> kC = {
      "auto",     "break",   "case",     "char",   "const",    "continue",
      "default",  "do",      "double",   "else",   "enum",     "extern",
      "float",    "for",     "goto",     "if",     "inline",   "int",
      "long",     "register", "restrict", "return", "short",   "signed",
      "sizeof",   "static",  "struct",   "switch", "typedef",  "union",
      "unsigned", "void",    "volatile", "while",  "bool",     "true",
      "false",    "_Bool",   "_Generic", "NULL"};
  static const std::unordered_set<std::string_view> kRust = {
      "as",    "break", "const", "continue", "crate", "else",   "enum",
      "extern", "false", "fn",   "for",      "if",    "impl",   "in",
      "let",   "loop",  "match", "mod",      "move",  "mut",    "pub",
      "ref",   "return", "self", "Self",     "static", "struct", "super",
      "trait", "true",  "type",  "unsafe",   "use",   "where",  "while",
      "dyn"};
  static const std::unordered_set<std::string_view> kGo = {
      "break",   "case",   "chan",    "const",  "continue", "default",
      "defer",   "else",   "fallthrough", "for", "func",    "go",
      "goto",    "if",     "import",  "interface", "map",   "package",
      "range",   "return", "select",  "struct", "switch",   "type",
      "var",     "true",   "false",   "nil"};
  static const std::unordered_set<std::string_view> kJs = {
      "break",  "case",   "catch",  "class",    "const",  "continue",
      "debugger", "default", "delete", "do",    "else",   "export",
      "extends", "finally", "for",   "function", "if",    "import",
      "in",     "instanceof", "let", "new",      "return", "super",
      "switch", "this",   "throw",  "try",      "typeof", "var",
      "void",   "while",  "with",   "yield",    "true",   "false",
      "null",   "undefined", "of"};
  static const std::unordered_set<std::string_view> kNone;
  switch (language) {
    case Language::kPython:
      return kPython;
    case Language::kC:
      return kC;
    case Language::kRust:
      return kRust;
    case Language::kGo:
      return kGo;
    case Language::kJavaScript:
      return kJs;
    case Language::kHtml:
      return kNone;
  }
  return kNone;
}

constexpr std::array<std::string_view, 44> kOperators = {
    "===", "!==", "**=", "//=", ">>=", "<<=", "...", "..=", "&&=", "||=",
    "->",  ":=",  "==",  "!=",  "<=",  ">=",  "**",  "//",  "<<",  ">>",
    "+=",  "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",  "&&",  "||",
    "::",  "++",  "--",  "=>",  "<-",  "..",  "?.",  "??",  "@=",  "&^",
    "%=",  "^=",  "|=",  "&="};

bool IsIdentStart(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80 || c == '$';
}

bool IsIdentChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80 || c == '$';
}

class Lexer {
 public:
  Lexer(Language language, std::string_view src)
      : language_(language), src_(src), keywords_(KeywordSet(language)) {}

  std::vector<Token> Run() {
    while (pos_ < src_.size()) {
      unsigned char c = src_[pos_];
      if (c == '\n') {
        if (language_ == Language::kPython) Emit(TokenKind::kNewline, pos_, pos_ + 1);
        ++pos_;
      } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        pos_ += 2;
      } else if (std::isspace(c)) {
        ++pos_;
      } else if (IsCommentStart()) {
        LexComment();
      } else if (IsStringStart()) {
        LexString();
      } else if (std::isdigit(c) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        LexNumber();
      } else if (IsIdentStart(c) && !(language_ != Language::kJavaScript && c == '$')) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               IsIdentChar(static_cast<unsigned char>(src_[pos_]))) {
          ++pos_;
        }
        std::string_view word = src_.substr(start, pos_ - start);
        Emit(keywords_.count(word) ? TokenKind::kKeyword : TokenKind::kIdentifier,
             start, pos_);
      } else {
        LexPunct();
      }
    }
    return std::move(tokens_);
  }

 private:
  void Emit(TokenKind kind, std::size_t begin, std::size_t end,
            bool interpolated = false) {
    tokens_.push_back(Token{kind, std::string(src_.substr(begin, end - begin)),
                            begin, end, interpolated});
  }

  bool IsCommentStart() const {
    if (language_ == Language::kPython) return src_[pos_] == '#';
    return src_.compare(pos_, 2, "//") == 0 || src_.compare(pos_, 2, "/*") == 0;
  }

  void LexComment() {
    std::size_t start = pos_;
    if (language_ != Language::kPython && src_.compare(pos_, 2, "/*") == 0) {
      std::size_t close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) {
        throw ValidationError("unterminated block comment");
      }
      pos_ = close + 2;
    } else {
      std::size_t nl = src_.find('\n', pos_);
      pos_ = nl == std::string_view::npos ? src_.size() : nl;
    }
    Emit(TokenKind::kComment, start, pos_);
  }

  // Returns the length of a string prefix at pos_ if a string starts there.
  std::size_t StringPrefixLength() const {
    std::size_t i = pos_;
    if (language_ == Language::kPython) {
      while (i < src_.size() && i - pos_ < 2 &&
             std::strchr("rRbBuUfF", src_[i]) != nullptr) {
        ++i;
      }
      if (i < src_.size() && (src_[i] == '"' || src_[i] == '\'')) return i - pos_;
      return std::string_view::npos;
    }
    if (language_ == Language::kRust && std::isalpha(static_cast<unsigned char>(src_[i]))) {
      if (src_.compare(i, 2, "b\"") == 0) return 1;
      std::size_t j = i;
      if (src_.compare(i, 2, "br") == 0) {
        j += 2;
      } else if (src_[i] == 'r') {
        j += 1;
      } else {
        return std::string_view::npos;
      }
      while (j < src_.size() && src_[j] == '#') ++j;
      if (j < src_.size() && src_[j] == '"') return j - pos_;
      return std::string_view::npos;
    }
    char c = src_[i];
    if (c == '"') return 0;
    if (c == '\'' && language_ != Language::kRust) return 0;
    if (c == '\'' && language_ == Language::kRust && IsRustCharLiteral()) return 0;
    if (c == '`' && (language_ == Language::kGo || language_ == Language::kJavaScript)) {
      return 0;
    }
    return std::string_view::npos;
  }

  bool IsRustCharLiteral() const {
    // 'x' or '\n' style literals; otherwise a lifetime such as 'a.
    if (pos_ + 2 < src_.size() && src_[pos_ + 1] == '\\') return true;
    if (pos_ + 2 < src_.size() && src_[pos_ + 2] == '\'') return true;
    // Multi-byte UTF-8 char literal.
    if (pos_ + 1 < src_.size() && static_cast<unsigned char>(src_[pos_ + 1]) >= 0x80) {
      std::size_t close = src_.find('\'', pos_ + 1);
      return close != std::string_view::npos && close - pos_ <= 5;
    }
    return false;
  }

  bool IsStringStart() const {
    unsigned char c = src_[pos_];
    if (c == '"' || c == '\'' || c == '`' || std::isalpha(c)) {
      return StringPrefixLength() != std::string_view::npos;
    }
    return false;
  }

  void LexString() {
    std::size_t start = pos_;
    std::size_t prefix = StringPrefixLength();
    std::string_view prefix_text = src_.substr(pos_, prefix);
    bool interpolated = prefix_text.find_first_of("fF") != std::string_view::npos;
    pos_ += prefix;
    if (language_ == Language::kRust && !prefix_text.empty() &&
        prefix_text.find('r') != std::string_view::npos) {
      std::size_t hashes = prefix_text.size() - prefix_text.find('r') - 1;
      std::string closer = "\"" + std::string(hashes, '#');
      std::size_t close = src_.find(closer, pos_ + 1);
      if (close == std::string_view::npos) throw ValidationError("unterminated raw string");
      pos_ = close + closer.size();
      Emit(TokenKind::kString, start, pos_);
      return;
    }
    char quote = src_[pos_];
    bool triple = language_ == Language::kPython &&
                  src_.compare(pos_, 3, std::string(3, quote)) == 0;
    bool raw_backtick = quote == '`' && language_ == Language::kGo;
    if (triple) {
      pos_ += 3;
      std::string closer(3, quote);
      while (pos_ < src_.size() && src_.compare(pos_, 3, closer) != 0) {
        if (src_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      if (pos_ >= src_.size()) throw ValidationError("unterminated string literal");
      pos_ += 3;
    } else {
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != quote) {
        if (src_[pos_] == '\\' && !raw_backtick) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '\n' && quote != '`') {
          throw ValidationError("unterminated string literal");
        }
        ++pos_;
      }
      if (pos_ >= src_.size()) throw ValidationError("unterminated string literal");
      ++pos_;
    }
    Emit(TokenKind::kString, start, pos_, interpolated);
  }

  void LexNumber() {
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      unsigned char c = src_[pos_];
      if (std::isalnum(c) || c == '_' || c == '.') {
        if (c == '.' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '.') break;
        ++pos_;
      } else if ((c == '+' || c == '-') && pos_ > start &&
                 (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E') &&
                 !(src_[start] == '0' && pos_ - start > 1 &&
                   (src_[start + 1] == 'x' || src_[start + 1] == 'X'))) {
        ++pos_;
      } else {
        break;
      }
    }
    Emit(TokenKind::kNumber, start, pos_);
  }

  void LexPunct() {
    for (std::string_view op : kOperators) {
      if (src_.compare(pos_, op.size(), op) == 0) {
        Emit(TokenKind::kPunct, pos_, pos_ + op.size());
        pos_ += op.size();
        return;
      }
    }
    Emit(TokenKind::kPunct, pos_, pos_ + 1);
    ++pos_;
  }

  Language language_;
  std::string_view src_;
  const std::unordered_set<std::string_view>& keywords_;
  std::size_t pos_ = 0;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> Lex(Language language, std::string_view source) {
  return Lexer(language, source).Run();
}

std::vector<Token> SignificantTokens(Language language,
                                     std::string_view source) {
  std::vector<Token> out;
  for (auto& tok : Lex(language, source)) {
    if (tok.kind != TokenKind::kComment && tok.kind != TokenKind::kNewline) {
      out.push_back(std::move(tok));
    }
  }
  return out;
}

bool IsKeyword(Language language, std::string_view word) {
  return KeywordSet(language).count(word) > 0;
}

std::string CanonicalForm(Language language, std::string_view source) {
  std::unordered_map<std::string, int> ids;
  std::string out;
  for (const auto& tok : SignificantTokens(language, source)) {
    if (!out.empty()) out += ' ';
    if (tok.kind == TokenKind::kIdentifier) {
      auto [it, inserted] = ids.try_emplace(tok.text, static_cast<int>(ids.size()));
      out += "$" + std::to_string(it->second);
    } else {
      out += tok.text;
    }
  }
  return out;
}

}  // namespace fpa
