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

#include "fpa/html.h"

#include <cctype>

#include "fpa/errors.h"
#include "fpa/lexer.h"
#include "fpa/text_util.h"

namespace fpa {

namespace {

// Position of `needle` at or after `from`, ignoring ASCII case.
std::size_t FindNoCase(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty()) return from;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    std::size_t k = 0;
    while (k < needle.size() &&
           std::tolower(static_cast<unsigned char>(hay[i + k])) ==
               std::tolower(static_cast<unsigned char>(needle[k]))) {
      ++k;
    }
    if (k == needle.size()) return i;
  }
  return std::string_view::npos;
}

std::string DecodeEntities(std::string_view s) {
  static const std::pair<std::string_view, std::string_view> kEntities[] = {
      {"&amp;", "&"}, {"&lt;", "<"},  {"&gt;", ">"},   {"&quot;", "\""},
      {"&#39;", "'"}, {"&apos;", "'"}, {"&nbsp;", " "},
  };
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto& [from, to] : kEntities) {
        if (s.substr(i, from.size()) == from) {
          out += to;
          i += from.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += s[i++];
  }
  return out;
}

std::string CollapseSpace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

std::string TagName(std::string_view tag) {
  std::size_t i = 0;
  if (i < tag.size() && tag[i] == '/') ++i;
  std::string name;
  while (i < tag.size() && (std::isalnum(static_cast<unsigned char>(tag[i])) || tag[i] == '-')) {
    name += static_cast<char>(std::tolower(static_cast<unsigned char>(tag[i])));
    ++i;
  }
  return name;
}

}  // namespace

bool ScriptBlock::HasAttribute(std::string_view name) const {
  for (const auto& tok : SplitLines(ReplaceAll(attributes, " ", "\n"))) {
    std::string_view t = Trim(tok);
    if (t == name || StartsWith(t, std::string(name) + "=")) return true;
  }
  return false;
}

std::vector<ScriptBlock> ExtractScripts(std::string_view html) {
  std::vector<ScriptBlock> out;
  std::size_t pos = 0;
  while ((pos = FindNoCase(html, "<script", pos)) != std::string_view::npos) {
    std::size_t gt = html.find('>', pos);
    if (gt == std::string_view::npos) throw ValidationError("unterminated <script> tag");
    std::size_t close = FindNoCase(html, "</script", gt);
    if (close == std::string_view::npos) throw ValidationError("<script> without </script>");
    std::size_t close_gt = html.find('>', close);
    if (close_gt == std::string_view::npos) throw ValidationError("unterminated </script> tag");
    ScriptBlock b;
    b.attributes = std::string(Trim(html.substr(pos + 7, gt - pos - 7)));
    b.body = std::string(html.substr(gt + 1, close - gt - 1));
    b.begin = pos;
    b.end = close_gt + 1;
    out.push_back(std::move(b));
    pos = close_gt + 1;
  }
  return out;
}

std::vector<std::string> StaticText(std::string_view html) {
  static const std::vector<std::string> kSkipped = {"head", "script", "style", "template",
                                                    "noscript", "title"};
  std::vector<std::string> out;
  std::string pending;
  auto flush = [&] {
    std::string t = CollapseSpace(DecodeEntities(pending));
    if (!t.empty()) out.push_back(t);
    pending.clear();
  };
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      pending += html[i++];
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    std::size_t gt = html.find('>', i);
    if (gt == std::string_view::npos) break;
    std::string_view tag = html.substr(i + 1, gt - i - 1);
    std::string name = TagName(tag);
    bool closing = !tag.empty() && tag[0] == '/';
    i = gt + 1;
    flush();
    if (!closing && std::find(kSkipped.begin(), kSkipped.end(), name) != kSkipped.end()) {
      std::size_t end = FindNoCase(html, "</" + name, i);
      if (end == std::string_view::npos) break;
      std::size_t end_gt = html.find('>', end);
      i = end_gt == std::string_view::npos ? html.size() : end_gt + 1;
    }
  }
  flush();
  return out;
}

std::vector<std::string> ScriptStrings(std::string_view html) {
  std::vector<std::string> out;
  for (const auto& script : ExtractScripts(html)) {
    for (const auto& tok : Lex(Language::kJavaScript, script.body)) {
      if (tok.kind == TokenKind::kString && tok.text.size() >= 2) {
        out.push_back(tok.text.substr(1, tok.text.size() - 2));
      }
    }
  }
  return out;
}

void CheckHtml(std::string_view html) {
  ExtractScripts(html);
  if (FindNoCase(html, "<body", 0) == std::string_view::npos ||
      FindNoCase(html, "</body>", 0) == std::string_view::npos) {
    throw ValidationError("page has no <body> element");
  }
}

std::string ShimProgram(std::string_view script_body) {
  std::string program =
      "const __fpaOut = [];\n"
      "const document = {\n"
      "  createElement: (tag) => ({ tagName: tag, textContent: \"\" }),\n"
      "  createTextNode: (text) => ({ textContent: String(text) }),\n"
      "  body: { appendChild: (n) => { __fpaOut.push(n.textContent); return n; },\n"
      "          append: (...ns) => { for (const n of ns) __fpaOut.push("
      "typeof n === \"string\" ? n : n.textContent); } },\n"
      "};\n";
  program += script_body;
  program += "\nfor (const line of __fpaOut) console.log(line);\n";
  return program;
}

std::string RenderText(std::string_view html, const ExecOracle& oracle,
                       const std::function<std::string(const std::string&)>& transform) {
  std::vector<std::string> lines = StaticText(html);
  for (const auto& script : ExtractScripts(html)) {
    if (!script.HasAttribute("data-fpa")) continue;
    std::string body = transform ? transform(script.body) : script.body;
    ExecResult r = oracle.ExecuteProgramMemoized(Language::kJavaScript, ShimProgram(body));
    if (!r.ok()) throw ValidationError("page script failed: " + r.Describe());
    for (const auto& line : SplitLines(r.stdout_normalized)) {
      std::string t = CollapseSpace(line);
      if (!t.empty()) lines.push_back(t);
    }
  }
  return Join(lines, "\n");
}

}  // namespace fpa
