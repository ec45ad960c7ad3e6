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

#ifndef FPA_RENAMER_H_
#define FPA_RENAMER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fpa/code_unit.h"
#include "fpa/corpus.h"

namespace fpa {

// Old name -> new name.
using RenameMap = std::map<std::string, std::string>;

// User-defined names declared in `units` (function and class names,
// parameters, assigned locals, loop and comprehension targets), in order of
// first declaration. Names reached as attributes, imported names and dunder
// names are excluded. Throws RenameError when a declaration shadows a
// builtin or an imported name, and for languages other than Python.
std::vector<std::string> DeclaredIdentifiers(const std::vector<const CodeUnit*>& units);

// Draws a fresh alphanumeric name per declared identifier from a generator
// seeded with `seed`. A draw that collides with any existing identifier,
// keyword, builtin or earlier draw is discarded and redrawn.
RenameMap PlanRenaming(const std::vector<const CodeUnit*>& units, std::uint64_t seed);

// Rewrites source, prelude and invocation of `unit`. String literals are
// untouched except for the expressions inside f-strings; attribute names
// and keyword arguments of calls to non-renamed callees are kept.
CodeUnit ApplyRenaming(const CodeUnit& unit, const RenameMap& map);

CodeUnit RandomizeIdentifiers(const CodeUnit& unit, std::uint64_t seed);

// Renames P and P' with one shared mapping so the pair stays structurally
// aligned. Values are unchanged because renaming preserves semantics.
DeceptionPatternRecord RandomizeRecordIdentifiers(const DeceptionPatternRecord& record,
                                                  std::uint64_t seed);

}  // namespace fpa

#endif  // FPA_RENAMER_H_
