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

#include "fpa/scripted_provider.h"

#include <cctype>
#include <map>
#include <mutex>
#include <regex>

#include "fpa/errors.h"
#include "fpa/html.h"
#include "fpa/lexer.h"
#include "fpa/text_util.h"

namespace fpa {

using nlohmann::json;

long WordCount(std::string_view text) {
  long n = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c));
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

namespace {

std::string Between(std::string_view text, std::string_view open, std::string_view close) {
  auto a = text.find(open);
  if (a == std::string_view::npos) return {};
  a += open.size();
  auto b = text.rfind(close);
  if (b == std::string_view::npos || b < a) return std::string(text.substr(a));
  return std::string(text.substr(a, b - a));
}

std::string StripQuotes(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '`')) s.pop_back();
  while (!s.empty() && s.front() == '`') s.erase(s.begin());
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

std::string HeuristicAnswer(std::string_view response) {
  if (auto block = LastFencedBlock(response)) return NormalizeOutput(*block);
  std::string lower = ToLower(response);
  auto pos = lower.rfind("output is");
  if (pos != std::string::npos) {
    std::string_view rest = response.substr(pos + 9);
    if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
    auto lines = SplitLines(rest);
    if (!lines.empty()) return StripQuotes(std::string(Trim(lines.front())));
  }
  auto lines = SplitLines(response);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (!Trim(*it).empty()) return std::string(Trim(*it));
  }
  return {};
}

bool LooselyEqual(std::string_view a, std::string_view b) {
  auto squash = [](std::string_view s) {
    std::string t(Trim(s));
    static const std::regex kLabel(R"(^[A-Za-z_ ]{1,20}:\s*)");
    t = std::regex_replace(t, kLabel, "", std::regex_constants::format_first_only);
    std::string out;
    for (char c : t) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    return StripQuotes(out);
  };
  return squash(a) == squash(b);
}

std::optional<std::string> SubstituteFamiliar(Language language, std::string_view program,
                                              const std::vector<DeceptionPatternRecord>& patterns) {
  std::string current(program);
  bool changed = false;
  for (int round = 0; round < 16; ++round) {
    bool found = false;
    auto prog = SignificantTokens(language, current);
    for (const auto& record : patterns) {
      if (record.language() != language) continue;
      auto dec = SignificantTokens(language, DefinitionBody(language, record.deceptive.source));
      if (dec.empty() || dec.size() > prog.size()) continue;
      for (std::size_t start = 0; start + dec.size() <= prog.size() && !found; ++start) {
        std::map<std::string, std::string> fwd, back;
        bool ok = true;
        for (std::size_t k = 0; k < dec.size() && ok; ++k) {
          const Token& a = dec[k];
          const Token& b = prog[start + k];
          if (a.kind != b.kind) {
            ok = false;
          } else if (a.kind == TokenKind::kIdentifier) {
            auto [f, f_new] = fwd.try_emplace(a.text, b.text);
            auto [r, r_new] = back.try_emplace(b.text, a.text);
            ok = f->second == b.text && r->second == a.text;
          } else {
            ok = a.text == b.text;
          }
        }
        if (!ok) continue;
        // Familiar source with the matched identifiers, trimmed to its
        // significant span.
        const std::string fam = DefinitionBody(language, record.familiar.source);
        auto fam_tokens = Lex(language, fam);
        std::size_t first = std::string::npos;
        std::string renamed;
        std::size_t cursor = 0;
        for (const auto& tok : fam_tokens) {
          if (tok.kind == TokenKind::kComment || tok.kind == TokenKind::kNewline) continue;
          if (first == std::string::npos) {
            first = tok.begin;
            cursor = tok.begin;
          }
          renamed += fam.substr(cursor, tok.begin - cursor);
          auto it = tok.kind == TokenKind::kIdentifier ? fwd.find(tok.text) : fwd.end();
          renamed += it != fwd.end() ? it->second : tok.text;
          cursor = tok.end;
        }
        std::size_t begin = prog[start].begin;
        std::size_t end = prog[start + dec.size() - 1].end;
        current = current.substr(0, begin) + renamed + current.substr(end);
        found = true;
        changed = true;
      }
      if (found) break;
    }
    if (!found) break;
  }
  if (!changed) return std::nullopt;
  return current;
}

namespace {

std::string LastUserMessage(const CompletionRequest& req) {
  for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
    if (it->role == "user") return it->content;
  }
  return {};
}

std::string FirstUserMessage(const CompletionRequest& req) {
  for (const auto& m : req.messages) {
    if (m.role == "user") return m.content;
  }
  return {};
}

std::string Fenced(std::string_view info, std::string_view body) {
  std::string out = "```" + std::string(info) + "\n" + std::string(body);
  if (out.back() != '\n') out += '\n';
  return out + "```\n";
}

std::string DescribeRun(const ExecResult& r) {
  if (!r.ok()) return "Tracing it through, the program stops with an error before printing.";
  return "Tracing the program step by step, it prints:\n\n" + Fenced("", r.stdout_normalized);
}

class ScriptedBackend : public Backend {
 public:
  ScriptedBackend(const ProviderConfig& config, ScriptContext context)
      : context_(std::move(context)) {
    behavior_ = config.script.value("behavior", std::string("faithful"));
    static const std::vector<std::string> kBehaviors = {"faithful", "bias",  "echo",
                                                        "schedule", "miner", "judge"};
    if (std::find(kBehaviors.begin(), kBehaviors.end(), behavior_) == kBehaviors.end()) {
      throw UsageError("scripted provider '" + config.id + "': unknown behavior '" +
                       behavior_ + "'");
    }
    if (behavior_ == "schedule") {
      if (!config.script.contains("rules") || !config.script["rules"].is_array()) {
        throw UsageError("scripted provider '" + config.id + "': schedule needs rules");
      }
      for (const auto& r : config.script["rules"]) {
        Rule rule;
        rule.match = r.value("match", std::string());
        rule.purpose = r.value("purpose", std::string());
        for (const auto& s : r.at("responses")) rule.responses.push_back(s.get<std::string>());
        if (rule.responses.empty()) {
          throw UsageError("scripted provider '" + config.id + "': empty response list");
        }
        rules_.push_back(std::move(rule));
      }
    }
    if (behavior_ == "miner") {
      success_every_ = config.script.value("success_every", 10);
      crash_every_ = config.script.value("crash_every", 0);
      distinct_ = config.script.value("distinct", true);
      if (success_every_ < 1) throw UsageError("miner success_every must be >= 1");
    }
    needs_oracle_ = behavior_ == "faithful" || behavior_ == "bias" || behavior_ == "miner";
  }

  bool remote() const override { return false; }

  Completion Complete(const ProviderConfig& config, const CompletionRequest& req) override {
    Completion c;
    c.text = Respond(config, req);
    for (const auto& m : req.messages) c.input_tokens += WordCount(m.content);
    c.output_tokens = WordCount(c.text);
    return c;
  }

 private:
  struct Rule {
    std::string match;
    std::string purpose;
    std::vector<std::string> responses;
  };

  const ExecOracle& Oracle(const ProviderConfig& config) const {
    if (context_.oracle == nullptr) {
      throw UsageError("scripted provider '" + config.id + "' needs an execution oracle");
    }
    return *context_.oracle;
  }

  std::string Respond(const ProviderConfig& config, const CompletionRequest& req) {
    const std::string user = LastUserMessage(req);
    if (behavior_ == "schedule") {
      for (std::size_t i = 0; i < rules_.size(); ++i) {
        const Rule& r = rules_[i];
        if (!r.purpose.empty() && r.purpose != PurposeName(req.purpose)) continue;
        if (user.find(r.match) == std::string::npos) continue;
        // The trial number picks the response when the tag carries one, so
        // concurrent trials stay deterministic.
        static const std::regex kTrial(R"(trial=(\d+))");
        std::smatch m;
        std::size_t n;
        if (std::regex_search(req.sample_tag, m, kTrial)) {
          n = std::stoul(m[1]);
        } else {
          std::lock_guard lock(mu_);
          n = counters_[std::to_string(i) + ":" + MessagesHash(req.messages)]++;
        }
        return r.responses[n % r.responses.size()];
      }
    }
    switch (req.purpose) {
      case Purpose::kJudgeExtract:
        return "<answer>" +
               HeuristicAnswer(Between(FirstUserMessage(req), "<response>\n", "\n</response>")) +
               "</answer>";
      case Purpose::kJudgeEqual: {
        std::string first = FirstUserMessage(req);
        bool same = LooselyEqual(Between(first, "Answer A:\n", "\n\nAnswer B:"),
                                 Between(first, "Answer B:\n", "\n\nReply with"));
        return same ? "<answer>yes</answer>" : "<answer>no</answer>";
      }
      case Purpose::kJudgeMentions: {
        std::string first = FirstUserMessage(req);
        return Mentions(Between(first, "<summary>\n", "\n</summary>"),
                        Between(first, "<content>\n", "\n</content>"))
                   ? "<answer>yes</answer>"
                   : "<answer>no</answer>";
      }
      default:
        break;
    }
    if (behavior_ == "judge" || behavior_ == "schedule") {
      throw ProviderError("scripted provider '" + config.id + "' (" + behavior_ +
                          ") has no answer for this " + std::string(PurposeName(req.purpose)) +
                          " request");
    }
    if (needs_oracle_) Oracle(config);
    if (behavior_ == "miner") return Mine(config, req.purpose, user);
    switch (req.purpose) {
      case Purpose::kPredict: return Predict(config, user);
      case Purpose::kRewrite: return Rewrite(user);
      case Purpose::kSummarize: return Summarize(config, user);
      default:
        throw ProviderError("scripted provider '" + config.id + "' (" + behavior_ +
                            ") does not handle " + std::string(PurposeName(req.purpose)));
    }
  }

  // Code and language of the last fenced block in a prompt.
  static std::pair<Language, std::string> PromptCode(const std::string& user) {
    std::string info;
    auto block = LastFencedBlock(user, &info);
    if (!block) throw MalformedResponseError("prompt carries no fenced code block");
    return {ParseLanguage(info.empty() ? "python" : info), *block};
  }

  std::string Predict(const ProviderConfig& config, const std::string& user) {
    auto [language, code] = PromptCode(user);
    if (behavior_ == "echo") {
      throw ProviderError("scripted provider '" + config.id + "' (echo) cannot predict");
    }
    if (behavior_ == "bias") {
      if (auto sub = SubstituteFamiliar(language, code, context_.patterns)) code = *sub;
    }
    return DescribeRun(Oracle(config).ExecuteProgramMemoized(language, code));
  }

  std::string Rewrite(const std::string& user) {
    auto [language, code] = PromptCode(user);
    if (behavior_ == "bias") {
      if (auto sub = SubstituteFamiliar(language, code, context_.patterns)) code = *sub;
    }
    return "Here is the rewritten program.\n\n" + Fenced(LanguageName(language), code);
  }

  std::string Summarize(const ProviderConfig& config, const std::string& user) {
    auto [language, html] = PromptCode(user);
    (void)language;
    std::vector<std::string> parts;
    if (behavior_ == "echo") {
      parts = StaticText(html);
      for (auto& s : ScriptStrings(html)) {
        if (WordCount(s) >= 2) parts.push_back(s);
      }
    } else {
      std::function<std::string(const std::string&)> transform;
      if (behavior_ == "bias") {
        transform = [this](const std::string& body) {
          auto sub = SubstituteFamiliar(Language::kJavaScript, body, context_.patterns);
          return sub ? *sub : body;
        };
      }
      parts = SplitLines(RenderText(html, Oracle(config), transform));
    }
    return "The page shows the following content:\n" + Join(parts, "\n") + "\n";
  }

  static bool Mentions(std::string_view summary, std::string_view content) {
    if (ContainsIgnoreCase(summary, Trim(content))) return true;
    std::vector<std::string> words;
    std::string word;
    auto flush = [&] {
      if (word.size() > 3) words.push_back(ToLower(word));
      word.clear();
    };
    for (char c : content) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        word += c;
      } else {
        flush();
      }
    }
    flush();
    if (words.empty()) return false;
    std::size_t hits = 0;
    for (const auto& w : words) hits += ContainsIgnoreCase(summary, w) ? 1 : 0;
    return hits * 2 >= words.size();
  }

  // Miner: pattern i (1-based) is a counting loop; every success_every-th
  // one is perturbed by turning >= into >, the rest by a pure rename.
  std::string Mine(const ProviderConfig& config, Purpose purpose, const std::string& user) {
    static const std::regex kVariation(R"(Variation: (\d+))");
    static const std::regex kVariant(R"(# variant (\d+))");
    std::smatch m;
    switch (purpose) {
      case Purpose::kGenerate: {
        if (!std::regex_search(user, m, kVariation)) {
          throw MalformedResponseError("generation prompt has no variation index");
        }
        long i = std::stol(m[1]);
        long v = distinct_ ? i : 0;
        long t = 3 + v % 5;
        std::string call = "count_at_least([" + std::to_string(v) + ", " + std::to_string(t) +
                           ", " + std::to_string(t + 2) + ", 1], " + std::to_string(t) + ")";
        if (crash_every_ > 0 && i % crash_every_ == 0) call = "count_at_least(None, 3)";
        std::string code = "# variant " + std::to_string(i) +
                           "\n"
                           "def count_at_least(values, threshold):\n"
                           "    total = 0\n"
                           "    for value in values:\n"
                           "        if value >= threshold:\n"
                           "            total += 1\n"
                           "    return total\n"
                           "\n"
                           "V = " + call + "\n";
        return "Here is a counting helper.\n\n" + Fenced("python", code);
      }
      case Purpose::kPerturb: {
        auto [language, code] = PromptCode(user);
        (void)language;
        if (!std::regex_search(code, m, kVariant)) {
          throw MalformedResponseError("perturbation prompt has no variant marker");
        }
        long i = std::stol(m[1]);
        std::vector<std::string> kept;
        for (const auto& line : SplitLines(code)) {
          if (!StartsWith(line, "V = ")) kept.push_back(line);
        }
        std::string fn = Join(kept, "\n");
        while (!fn.empty() && fn.back() == '\n') fn.pop_back();
        if (i % success_every_ == 0) {
          fn = ReplaceAll(fn, "value >= threshold", "value > threshold");
        } else {
          fn = ReplaceAll(fn, "total", "count");
        }
        return Fenced("python", fn + "\n");
      }
      case Purpose::kPredict: {
        auto [language, code] = PromptCode(user);
        code = ReplaceAll(code, "value > threshold", "value >= threshold");
        return DescribeRun(Oracle(config).ExecuteProgramMemoized(language, code));
      }
      default:
        throw ProviderError("scripted provider '" + config.id + "' (miner) does not handle " +
                            std::string(PurposeName(purpose)));
    }
  }

  ScriptContext context_;
  std::string behavior_;
  bool needs_oracle_ = false;
  std::vector<Rule> rules_;
  int success_every_ = 10;
  int crash_every_ = 0;
  bool distinct_ = true;
  std::mutex mu_;
  std::map<std::string, std::size_t> counters_;
};

}  // namespace

std::unique_ptr<Backend> MakeScriptedBackend(const ProviderConfig& config,
                                             const ScriptContext& context) {
  return std::make_unique<ScriptedBackend>(config, context);
}

}  // namespace fpa
