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

#ifndef FPA_HTML_H_
#define FPA_HTML_H_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fpa/exec_oracle.h"

namespace fpa {

struct ScriptBlock {
  std::string attributes;  // raw text between "<script" and ">"
  std::string body;
  std::size_t begin = 0;  // offset of "<script"
  std::size_t end = 0;    // one past "</script>"

  bool HasAttribute(std::string_view name) const;
};

std::vector<ScriptBlock> ExtractScripts(std::string_view html);

// Visible text nodes in document order, whitespace-collapsed. Content of
// head, script, style, template and noscript elements and of comments is
// skipped; common character references are decoded.
std::vector<std::string> StaticText(std::string_view html);

// String literals appearing in any script, in order.
std::vector<std::string> ScriptStrings(std::string_view html);

// Throws ValidationError for markup that cannot be a page: unbalanced
// script tags or no body element.
void CheckHtml(std::string_view html);

// Text a browser shows: StaticText followed by the text each data-fpa
// script appends to document.body. Those scripts run under node against a
// minimal document shim. `transform`, when set, rewrites a script body
// before it runs.
std::string RenderText(std::string_view html, const ExecOracle& oracle,
                       const std::function<std::string(const std::string&)>& transform = {});

// The node program RenderText runs for one script body.
std::string ShimProgram(std::string_view script_body);

}  // namespace fpa

#endif  // FPA_HTML_H_
