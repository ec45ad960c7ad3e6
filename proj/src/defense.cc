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

#include "fpa/defense.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "fpa/errors.h"
#include "fpa/html.h"
#include "fpa/parallel.h"
#include "fpa/text_util.h"

namespace fpa {

using nlohmann::json;

std::string_view DefenseArmName(DefenseArm arm) {
  return arm == DefenseArm::kControl ? "control" : "attack";
}

std::string_view TrialOutcomeName(TrialOutcome outcome) {
  switch (outcome) {
    case TrialOutcome::kDefended: return "defended";
    case TrialOutcome::kCircumvented: return "circumvented";
    case TrialOutcome::kUnparseable: return "unparseable";
  }
  return "?";
}

std::string ArmorScript(const DeceptionPatternRecord& pattern, std::string_view decoy,
                        DefenseArm arm) {
  const CodeUnit& p = arm == DefenseArm::kAttack ? pattern.deceptive : pattern.familiar;
  std::string op = arm == DefenseArm::kAttack ? "===" : "!==";
  std::string script = "\n" + std::string(TrimRight(p.source)) + "\n";
  script += "if (" + p.invocation + " " + op + " " +
            ValueLiteral(Language::kJavaScript, pattern.familiar_value) + ") {\n";
  script += "  const note = document.createElement(\"p\");\n";
  script += "  note.textContent = \"" + std::string(decoy) + "\";\n";
  script += "  document.body.appendChild(note);\n";
  script += "}\n";
  return script;
}

namespace {

void CheckDecoy(const std::string& decoy) {
  if (Trim(decoy).empty()) throw ValidationError("decoy content is empty");
  for (std::string_view bad : {"\"", "\\", "\n", "\r", "</"}) {
    if (decoy.find(bad) != std::string::npos) {
      throw ValidationError("decoy content may not contain quotes, backslashes, newlines or '</'");
    }
  }
}

std::size_t BodyClose(const std::string& html) {
  std::string lower = ToLower(html);
  std::size_t at = lower.rfind("</body");
  if (at == std::string::npos) throw ValidationError("page has no </body> tag");
  return at;
}

}  // namespace

ArmoredPage ArmorPage(const std::string& name, const std::string& original_html,
                      const DeceptionPatternRecord& pattern, const std::string& decoy,
                      const ExecOracle& oracle, DefenseArm arm) {
  if (pattern.language() != Language::kJavaScript) {
    throw ValidationError("pattern '" + pattern.id + "' is " +
                          std::string(LanguageName(pattern.language())) +
                          "; page armoring needs javascript");
  }
  CheckDecoy(decoy);
  CheckHtml(original_html);
  if (ContainsIgnoreCase(original_html, decoy)) {
    throw ValidationError("page '" + name + "' already contains the decoy");
  }
  if (!oracle.HasToolchain(Language::kJavaScript)) {
    throw EnvironmentError("page armoring needs node to compute the rendered text");
  }
  ArmoredPage page;
  page.name = name;
  page.original_html = original_html;
  page.pattern_id = pattern.id;
  page.arm = arm;
  page.decoy_content = decoy;
  page.pattern_script = ArmorScript(pattern, decoy, arm);
  std::size_t at = BodyClose(original_html);
  page.armored_html = original_html.substr(0, at) + "<script data-fpa>" + page.pattern_script +
                      "</script>\n" + original_html.substr(at);
  page.render_truth = RenderText(page.armored_html, oracle);
  std::string original_render = RenderText(original_html, oracle);
  if (page.render_truth != original_render) {
    throw ValidationError("armoring page '" + name + "' with '" + pattern.id +
                          "' changes what the page renders");
  }
  return page;
}

std::filesystem::path ArmoredPath(const std::filesystem::path& original,
                                  const std::optional<std::filesystem::path>& dir) {
  std::filesystem::path base = dir ? *dir : original.parent_path();
  return base / (original.stem().string() + ".armored.html");
}

std::vector<HtmlFixture> LoadHtmlFixtures(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw UsageError("fixture directory '" + dir.string() + "' does not exist");
  }
  std::vector<HtmlFixture> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::string file = entry.path().filename().string();
    if (!entry.is_regular_file() || !EndsWith(file, ".html") ||
        EndsWith(file, ".armored.html")) {
      continue;
    }
    out.push_back({entry.path().stem().string(), entry.path(), ReadFile(entry.path())});
  }
  std::sort(out.begin(), out.end(),
            [](const HtmlFixture& a, const HtmlFixture& b) { return a.name < b.name; });
  return out;
}

DefenseResult PlagiarismEval(const EvalContext& ctx, const std::string& provider_id,
                             const AttackSample& sample, const EvaluationConfig& config) {
  if (config.n_trials < 1) throw UsageError("n_trials must be at least 1");
  const CodeUnit& program = sample.composed;
  ExecResult truth = ctx.oracle->ExecuteMemoized(program, ctx.limits);
  if (!truth.ok()) throw ValidationError("sample does not run: " + truth.Describe());
  std::string language(LanguageName(program.language));
  std::string prompt = ctx.gateway->prompts().Render(
      "plagiarism_rewrite", {{"language", language}, {"code", AssembleProgram(program)}});

  DefenseResult r;
  r.study = "plagiarism";
  r.provider_id = provider_id;
  r.sample_id = sample.target.id + "+" + sample.pattern.id;
  r.arm = sample.strategy == Strategy::kControl ? DefenseArm::kControl : DefenseArm::kAttack;
  r.n = config.n_trials;
  for (int i = 0; i < config.n_trials; ++i) {
    CompletionRequest req;
    req.messages = {{"user", prompt}};
    req.purpose = Purpose::kRewrite;
    req.sample_tag = "trial=" + std::to_string(i);
    Completion c = ctx.gateway->Complete(provider_id, req);
    DefenseTrial t;
    t.raw_response = c.text;
    auto block = LastFencedBlock(c.text);
    std::string code = block ? *block : std::string(Trim(c.text));
    if (code.empty()) {
      t.outcome = TrialOutcome::kUnparseable;
      t.detail = "no code in the reply";
    } else {
      ExecResult run = ctx.oracle->ExecuteProgramMemoized(program.language, code, ctx.limits);
      if (!run.ok()) {
        t.outcome = TrialOutcome::kDefended;
        t.detail = "rewrite does not run: " + run.Describe();
      } else if (run.stdout_normalized != truth.stdout_normalized) {
        t.outcome = TrialOutcome::kDefended;
        t.detail = "rewrite prints different output";
      } else {
        t.outcome = TrialOutcome::kCircumvented;
      }
    }
    if (t.outcome != TrialOutcome::kCircumvented) ++r.defended;
    r.trials.push_back(std::move(t));
  }
  return r;
}

namespace {

std::string Summarize(const EvalContext& ctx, const std::string& provider_id,
                      const std::string& html, int trial) {
  CompletionRequest req;
  req.messages = {{"user", ctx.gateway->prompts().Render("page_summary", {{"html", html}})}};
  req.purpose = Purpose::kSummarize;
  req.sample_tag = "trial=" + std::to_string(trial);
  return ctx.gateway->Complete(provider_id, req).text;
}

}  // namespace

DefenseResult ScrapingEval(const EvalContext& ctx, const std::string& provider_id,
                           const ArmoredPage& page, const EvaluationConfig& config) {
  if (config.n_trials < 1) throw UsageError("n_trials must be at least 1");
  DefenseResult r;
  r.study = "scraping";
  r.provider_id = provider_id;
  r.sample_id = page.name + "+" + page.pattern_id;
  r.arm = page.arm;
  r.n = config.n_trials;
  for (int i = 0; i < config.n_trials; ++i) {
    DefenseTrial t;
    t.raw_response = Summarize(ctx, provider_id, page.armored_html, i);
    if (Trim(t.raw_response).empty()) {
      t.outcome = TrialOutcome::kUnparseable;
      t.detail = "empty summary";
    } else if (ContainsIgnoreCase(t.raw_response, page.decoy_content)) {
      t.outcome = TrialOutcome::kDefended;
      t.detail = "decoy quoted";
    } else {
      try {
        bool mentioned = JudgeMentions(*ctx.gateway, t.raw_response, page.decoy_content,
                                       "trial=" + std::to_string(i));
        t.outcome = mentioned ? TrialOutcome::kDefended : TrialOutcome::kCircumvented;
        t.detail = mentioned ? "decoy paraphrased" : "decoy omitted";
      } catch (const UnparseableError& e) {
        t.outcome = TrialOutcome::kUnparseable;
        t.detail = e.what();
      }
    }
    if (t.outcome != TrialOutcome::kCircumvented) ++r.defended;
    r.trials.push_back(std::move(t));
  }
  return r;
}

double CleanSummaryRate(const EvalContext& ctx, const std::string& provider_id,
                        const std::string& page_name, const std::string& html,
                        const EvaluationConfig& config) {
  std::string truth = RenderText(html, *ctx.oracle);
  if (Trim(truth).empty()) {
    throw ValidationError("page '" + page_name + "' renders no text");
  }
  int covered = 0;
  for (int i = 0; i < config.n_trials; ++i) {
    std::string summary = Summarize(ctx, provider_id, html, i);
    if (Trim(summary).empty()) continue;
    try {
      if (JudgeMentions(*ctx.gateway, summary, truth, "clean;trial=" + std::to_string(i))) {
        ++covered;
      }
    } catch (const UnparseableError&) {
    }
  }
  return static_cast<double>(covered) / config.n_trials;
}

namespace {

std::vector<std::string> ProviderIds(const EvaluationConfig& config) {
  std::vector<std::string> ids;
  for (const auto& p : config.providers) ids.push_back(p.id);
  return ids;
}

json Manifest(const EvalContext& ctx, const EvaluationConfig& config, const std::string& study) {
  json providers = json::array();
  for (const auto& p : config.providers) {
    providers.push_back(DescribeProvider(ctx.gateway->Provider(p.id)));
  }
  return {{"study", study},
          {"n_trials", config.n_trials},
          {"baseline_threshold", config.baseline_threshold},
          {"providers", providers},
          {"judge", ctx.gateway->JudgeId()},
          {"prompt_templates", ctx.gateway->prompts().Hashes()}};
}

void SortResults(std::vector<DefenseResult>& results) {
  std::stable_sort(results.begin(), results.end(),
                   [](const DefenseResult& a, const DefenseResult& b) {
                     return std::tie(a.study, a.provider_id, a.sample_id, a.arm) <
                            std::tie(b.study, b.provider_id, b.sample_id, b.arm);
                   });
}

}  // namespace

DefenseReport PlagiarismStudy(const EvalContext& ctx, const EvaluationConfig& config,
                              const std::vector<EvalSample>& samples) {
  if (config.n_trials < 1) throw UsageError("n_trials must be at least 1");
  DefenseReport report;
  report.manifest = Manifest(ctx, config, "plagiarism");
  std::vector<AttackSample> composed;
  for (const auto& s : samples) {
    for (Strategy strategy : {Strategy::kControl, s.strategy}) {
      TargetBehavior t = strategy == Strategy::kControl
                             ? DefaultBehavior(s.target.unit.language, strategy)
                             : s.behavior;
      AttackSample a = ComposeAttack(s.target, s.pattern, strategy, t, *ctx.oracle);
      RuntimeCheck check = CheckRuntime(a, *ctx.oracle, ctx.limits);
      if (!check.ok()) {
        throw ValidationError("sample '" + s.id() + "': " + Join(check.diagnostics, "; "));
      }
      composed.push_back(std::move(a));
    }
  }
  auto providers = ProviderIds(config);
  std::size_t per = composed.size();
  std::vector<DefenseResult> results(providers.size() * per);
  ParallelFor(static_cast<int>(results.size()), config.jobs, [&](int i) {
    results[i] = PlagiarismEval(ctx, providers[i / per], composed[i % per], config);
  });
  report.results = std::move(results);
  SortResults(report.results);
  return report;
}

DefenseReport ScrapingStudy(const EvalContext& ctx, const EvaluationConfig& config,
                            const std::vector<HtmlFixture>& fixtures,
                            const std::vector<DeceptionPatternRecord>& patterns,
                            const std::string& decoy) {
  if (config.n_trials < 1) throw UsageError("n_trials must be at least 1");
  if (!ctx.oracle->HasToolchain(Language::kJavaScript)) {
    throw EnvironmentError("the scraping study needs node to render pages");
  }
  DefenseReport report;
  report.manifest = Manifest(ctx, config, "scraping");
  report.manifest["decoy"] = decoy;
  std::vector<ArmoredPage> pages;
  for (const auto& f : fixtures) {
    for (const auto& p : patterns) {
      if (p.language() != Language::kJavaScript) continue;
      for (DefenseArm arm : {DefenseArm::kControl, DefenseArm::kAttack}) {
        pages.push_back(ArmorPage(f.name, f.html, p, decoy, *ctx.oracle, arm));
      }
    }
  }
  auto providers = ProviderIds(config);
  std::vector<double> clean(providers.size() * fixtures.size());
  ParallelFor(static_cast<int>(clean.size()), config.jobs, [&](int i) {
    const auto& f = fixtures[i % fixtures.size()];
    clean[i] = CleanSummaryRate(ctx, providers[i / fixtures.size()], f.name, f.html, config);
  });
  std::vector<std::pair<std::string, const ArmoredPage*>> tasks;
  for (std::size_t p = 0; p < providers.size(); ++p) {
    std::set<std::string> kept;
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
      double rate = clean[p * fixtures.size() + f];
      if (rate >= config.baseline_threshold) {
        kept.insert(fixtures[f].name);
      } else {
        report.dropped[providers[p]].emplace_back(fixtures[f].name, rate);
      }
    }
    for (const auto& page : pages) {
      if (kept.count(page.name)) tasks.emplace_back(providers[p], &page);
    }
  }
  std::vector<DefenseResult> results(tasks.size());
  ParallelFor(static_cast<int>(tasks.size()), config.jobs, [&](int i) {
    results[i] = ScrapingEval(ctx, tasks[i].first, *tasks[i].second, config);
  });
  report.results = std::move(results);
  SortResults(report.results);
  return report;
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Cell {
  double sum = 0.0;
  int count = 0;
  std::string Text() const { return count == 0 ? "-" : Fixed(100.0 * sum / count, 1) + "%"; }
};

}  // namespace

std::string DefenseCsv(const DefenseReport& report) {
  std::ostringstream out;
  out << "study,provider,sample,arm,n,defended,defense_rate,model_rate\n";
  for (const auto& r : report.results) {
    out << r.study << ',' << r.provider_id << ',' << r.sample_id << ','
        << DefenseArmName(r.arm) << ',' << r.n << ',' << r.defended << ','
        << Fixed(r.defense_rate(), 4) << ',' << Fixed(r.model_rate(), 4) << '\n';
  }
  return out.str();
}

std::string DefenseText(const DefenseReport& report) {
  std::vector<std::string> studies, providers;
  for (const auto& r : report.results) {
    if (std::find(studies.begin(), studies.end(), r.study) == studies.end()) {
      studies.push_back(r.study);
    }
    if (std::find(providers.begin(), providers.end(), r.provider_id) == providers.end()) {
      providers.push_back(r.provider_id);
    }
  }
  if (studies.empty() && report.manifest.contains("study")) {
    studies.push_back(report.manifest["study"].get<std::string>());
  }
  // (provider, study, arm) -> mean over samples of the model success rate.
  std::map<std::tuple<std::string, std::string, DefenseArm>, Cell> cells;
  for (const auto& r : report.results) {
    Cell& c = cells[{r.provider_id, r.study, r.arm}];
    c.sum += r.model_rate();
    c.count++;
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> groups = {"Model"}, head = {""};
  for (const auto& s : studies) {
    groups.insert(groups.end(),
                  {s == "plagiarism" ? "Anti plagiarism" : "Anti web scraping", "", ""});
    head.insert(head.end(), {"control", "attack", "defense"});
  }
  rows.push_back(groups);
  rows.push_back(head);
  std::vector<Cell> overall(studies.size() * 3);
  for (const auto& p : providers) {
    std::vector<std::string> row = {p};
    for (std::size_t s = 0; s < studies.size(); ++s) {
      Cell control = cells[{p, studies[s], DefenseArm::kControl}];
      Cell attack = cells[{p, studies[s], DefenseArm::kAttack}];
      Cell defense;
      if (attack.count) defense = {attack.count - attack.sum, attack.count};
      row.insert(row.end(), {control.Text(), attack.Text(), defense.Text()});
      for (int k = 0; k < 3; ++k) {
        const Cell& c = k == 0 ? control : k == 1 ? attack : defense;
        if (c.count) {
          overall[s * 3 + k].sum += c.sum / c.count;
          overall[s * 3 + k].count++;
        }
      }
    }
    rows.push_back(row);
  }
  if (!providers.empty()) {
    std::vector<std::string> row = {"Overall"};
    for (const auto& c : overall) row.push_back(c.Text());
    rows.push_back(row);
  }
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  out << "FPA defense report\n";
  if (report.manifest.contains("n_trials")) {
    out << "n_trials=" << report.manifest["n_trials"].get<int>() << "\n";
  }
  if (report.manifest.contains("decoy")) {
    out << "decoy: " << report.manifest["decoy"].get<std::string>() << "\n";
  }
  out << "control/attack: model success (rewrite keeps behavior, summary omits decoy);\n"
         "defense: 1 - attack.\n\n";
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string cell = row[i];
      cell.append(width[i] - cell.size(), ' ');
      line += (i == 0 ? "" : "  ") + cell;
    }
    out << TrimRight(line) << "\n";
  }
  if (providers.empty()) out << "No results.\n";
  for (const auto& [provider, list] : report.dropped) {
    for (const auto& [page, rate] : list) {
      out << "dropped by the clean summary check: " << provider << " " << page << " "
          << Fixed(rate, 4) << "\n";
    }
  }
  out << "\nPublished reference, live APIs (not reproduced offline), control/attack:\n"
         "  GPT-4o      plagiarism 86.1/71.93  scraping 70.8/5.6\n"
         "  Claude-3.5  plagiarism 82.0/31.5   scraping 65.2/14.5\n"
         "  Gemini-2.0  plagiarism 84.6/45.8   scraping 60.4/15.9\n"
         "  Overall     plagiarism 84.3/49.7   scraping 65.5/12.0\n";
  return out.str();
}

std::vector<std::filesystem::path> RenderDefenseReport(const DefenseReport& report,
                                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json results = json::array();
  for (const auto& r : report.results) {
    json trials = json::array();
    for (const auto& t : r.trials) {
      trials.push_back({{"raw_response", t.raw_response},
                        {"outcome", TrialOutcomeName(t.outcome)},
                        {"detail", t.detail}});
    }
    results.push_back({{"study", r.study}, {"provider", r.provider_id},
                       {"sample", r.sample_id}, {"arm", DefenseArmName(r.arm)},
                       {"n", r.n}, {"defended", r.defended}, {"trials", trials}});
  }
  json dropped = json::object();
  for (const auto& [provider, list] : report.dropped) {
    json l = json::array();
    for (const auto& [page, rate] : list) l.push_back({{"page", page}, {"rate", rate}});
    dropped[provider] = l;
  }
  json doc = {{"manifest", report.manifest}, {"results", results}, {"dropped", dropped}};
  std::vector<std::filesystem::path> paths = {dir / "defense.csv", dir / "defense.txt",
                                              dir / "defense.json"};
  WriteFile(paths[0], DefenseCsv(report));
  WriteFile(paths[1], DefenseText(report));
  WriteFile(paths[2], doc.dump(2) + "\n");
  return paths;
}

}  // namespace fpa
