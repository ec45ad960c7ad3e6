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

#ifndef FPA_LEXER_H_
#define FPA_LEXER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fpa/code_unit.h"

namespace fpa {

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kNumber,
  kString,
  kPunct,
  kComment,
  kNewline,
};

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t begin = 0;  // byte offset into the lexed source
  std::size_t end = 0;
  // Python string prefix contains 'f' (interpolated).
  bool interpolated = false;

  bool operator==(const Token&) const = default;
};

// Lightweight lexer shared by the renamer, the structural matcher, the
// dedupe key and the perturbation cost. It understands comments, string
// forms and keywords for every supported language but builds no syntax
// tree. Newline tokens are emitted only for Python, where they carry
// meaning. Unterminated strings or comments throw ValidationError.
std::vector<Token> Lex(Language language, std::string_view source);

// Lex() without comments and newlines.
std::vector<Token> SignificantTokens(Language language, std::string_view source);

bool IsKeyword(Language language, std::string_view word);

// Replaces identifiers with placeholders numbered by first occurrence and
// joins tokens with single spaces, so alpha-equivalent code canonicalizes
// to the same string.
std::string CanonicalForm(Language language, std::string_view source);

}  // namespace fpa

#endif  // FPA_LEXER_H_
