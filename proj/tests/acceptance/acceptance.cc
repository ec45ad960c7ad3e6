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

// Offline acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fpa/corpus.h"
#include "fpa/defense.h"
#include "fpa/errors.h"
#include "fpa/evaluator.h"
#include "fpa/exec_oracle.h"
#include "fpa/generator.h"
#include "fpa/html.h"
#include "fpa/injector.h"
#include "fpa/llm_gateway.h"
#include "fpa/parallel.h"
#include "fpa/renamer.h"
#include "fpa/run_config.h"
#include "fpa/scripted_provider.h"
#include "fpa/text_util.h"

namespace fpa {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path Source() { return FPA_SOURCE_DIR; }

fs::path Scratch(const std::string& name) {
  fs::path dir = fs::path(FPA_BINARY_DIR) / "acceptance-scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int Jobs() { return std::max(2u, std::thread::hardware_concurrency()); }

ExecOracle& Oracle() {
  static ExecOracle oracle;
  return oracle;
}

const Corpus& Seeds() {
  static Corpus c = LoadCorpus(Source() / "corpus" / "seed");
  return c;
}

const Corpus& Universality() {
  static Corpus c = LoadCorpus(Source() / "corpus" / "universality");
  return c;
}

// The ten Python fixture targets; the universality corpus has ten per
// compiled language.
const std::vector<std::string> kPythonTargets = {
    "access_control", "bank_account", "binary_search", "caesar",  "collatz",
    "fibonacci",      "gcd_lcm",      "isbn10",        "luhn",    "roman"};

std::vector<TargetProgram> PythonTargets() {
  std::vector<TargetProgram> out;
  for (const auto& id : kPythonTargets) out.push_back(Seeds().Target(id));
  return out;
}

std::vector<DeceptionPatternRecord> AllSeedVariants() {
  std::vector<DeceptionPatternRecord> out = Seeds().patterns;
  for (const auto& p : Universality().patterns) out.push_back(p);
  return out;
}

ProviderConfig Scripted(const std::string& id, const json& script) {
  ProviderConfig c;
  c.id = id;
  c.model_name = id + "-model";
  c.script = script;
  return c;
}

struct Harness {
  std::unique_ptr<LlmGateway> gateway;
  EvalContext ctx;
  EvaluationConfig config;

  explicit Harness(std::vector<ProviderConfig> providers,
                   std::optional<fs::path> cache = std::nullopt) {
    GatewayOptions o;
    o.script.oracle = &Oracle();
    o.script.patterns = AllSeedVariants();
    o.cache_dir = cache;
    gateway = std::make_unique<LlmGateway>(o);
    for (const auto& p : providers) gateway->Register(p);
    ctx.gateway = gateway.get();
    ctx.oracle = &Oracle();
    config.providers = providers;
  }
};

std::string Run(const CodeUnit& unit) {
  ExecResult r = Oracle().Execute(unit);
  if (!r.ok()) return "<" + r.Describe() + ">";
  return r.stdout_normalized;
}

// Length of the longest substring without a repeated character, by checking
// every substring.
int BruteForceLongestRepeatFree(const std::string& s) {
  int best = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j <= s.size(); ++j) {
      std::set<char> seen(s.begin() + i, s.begin() + j);
      if (seen.size() == j - i) best = std::max(best, static_cast<int>(j - i));
    }
  }
  return best;
}

Outcome SeedTruths() {
  auto start = std::chrono::steady_clock::now();
  const auto& lswr = Seeds().Pattern("lswr");
  const auto& vowel = Seeds().Pattern("vowel");
  const auto& fastpow = Seeds().Pattern("fastpow");
  std::string lswr_dec = Run(lswr.deceptive);
  std::string lswr_fam = Run(lswr.familiar);
  int brute = BruteForceLongestRepeatFree("pwwkew");
  std::string vowel_dec = Run(vowel.deceptive);
  std::string fast_dec = Run(fastpow.deceptive);
  // With an explicit modulus the perturbed normalization is harmless.
  CodeUnit with_mod = fastpow.deceptive;
  with_mod.invocation = "fast_power(3, 4, 5)";
  std::string fast_mod = Run(with_mod);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = lswr_dec == "4" && brute == 3 && lswr_fam == std::to_string(brute) &&
              vowel_dec == "False" && fast_dec == "0" && fast_mod == "1" && secs < 10.0;
  char detail[256];
  std::snprintf(detail, sizeof detail,
                "LSWR'(pwwkew)=%s brute-force=%d LSWR(pwwkew)=%s is_vowel'('u')=%s "
                "fast_power'(3,4)=%s fast_power'(3,4,5)=%s, %.1fs",
                lswr_dec.c_str(), brute, lswr_fam.c_str(), vowel_dec.c_str(), fast_dec.c_str(),
                fast_mod.c_str(), secs);
  return {pass, detail};
}

Outcome DefinitionTwo() {
  auto start = std::chrono::steady_clock::now();
  struct Case {
    TargetProgram target;
    DeceptionPatternRecord pattern;
  };
  std::vector<Case> cases;
  std::vector<TargetProgram> targets = PythonTargets();
  for (const auto& t : Universality().targets) targets.push_back(t);
  std::set<Language> languages;
  for (const auto& t : targets) {
    for (const auto& p : AllSeedVariants()) {
      if (p.language() != t.unit.language) continue;
      cases.push_back({t, p});
      languages.insert(t.unit.language);
    }
  }
  for (Language l : languages) {
    if (!Oracle().HasToolchain(l)) {
      return {false, "no toolchain for " + std::string(LanguageName(l))};
    }
  }
  std::vector<std::string> violations(cases.size());
  ParallelFor(cases.size(), Jobs(), [&](std::size_t i) {
    const Case& c = cases[i];
    std::string id = c.target.id + "+" + c.pattern.id;
    try {
      auto sample = ComposeAttack(c.target, c.pattern, Strategy::kInjectPhantom,
                                  DefaultBehavior(c.target.unit.language,
                                                  Strategy::kInjectPhantom),
                                  Oracle());
      RuntimeCheck rc = CheckRuntime(sample, Oracle());
      if (!rc.preserved) violations[i] = id + ": exec(x') != exec(x)";
      if (!rc.pattern_matters) violations[i] = id + ": exec(x with P) == exec(x)";
    } catch (const Error& e) {
      violations[i] = id + ": " + e.what();
    }
  });
  std::vector<std::string> bad;
  for (auto& v : violations) {
    if (!v.empty()) bad.push_back(v);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << cases.size() << " compositions over " << languages.size() << " languages, "
    << bad.size() << " violations";
  if (!bad.empty()) d << " (first: " << bad.front() << ")";
  d << ", " << std::fixed;
  d.precision(1);
  d << secs << "s";
  return {bad.empty() && languages.size() == 4 && secs < 120.0, d.str()};
}

// Serialized outcome of the targeted search plus the three-condition rates
// for every seed pattern and fixture target.
std::string SearchPipeline(const std::string& behavior, int* failures, std::string* first) {
  Harness h({Scripted(behavior, {{"behavior", behavior}})});
  h.config.n_trials = 10;
  std::string log;
  for (const auto& x : PythonTargets()) {
    for (const auto& record : Seeds().patterns) {
      auto t = DefaultBehavior(Language::kPython, Strategy::kInjectPhantom);
      SearchOutcome out = RunFpaSearch({h.gateway.get(), behavior, &Oracle(), {}}, x,
                                       Strategy::kInjectPhantom, t, {record},
                                       TargetedBudget());
      std::string id = x.id + "+" + record.id;
      log += id + " attempts=" + std::to_string(out.attempts) +
             " found=" + (out.sample ? "1" : "0") + " predicted=" + out.predicted_output + "\n";
      bool ok;
      if (behavior == "bias") {
        ok = out.sample && out.attempts == 1;
        if (ok) {
          auto rates = EvaluateConditions(h.ctx, behavior,
                                          {x, record, t, Strategy::kInjectPhantom}, h.config);
          std::vector<double> got;
          for (const auto& r : rates) {
            got.push_back(r.rate());
            for (const auto& trial : r.trials) log += trial.prompt_hash + trial.raw_response;
          }
          log += out.sample->composed.source;
          ok = got == std::vector<double>{1.0, 1.0, 0.0};
        }
      } else {
        ok = !out.sample;
      }
      if (!ok) {
        ++*failures;
        if (first->empty()) *first = behavior + " " + id;
      }
    }
  }
  return log;
}

Outcome AlgorithmOne() {
  int failures = 0;
  std::string first;
  std::string bias_a = SearchPipeline("bias", &failures, &first);
  std::string bias_b = SearchPipeline("bias", &failures, &first);
  std::string faithful_a = SearchPipeline("faithful", &failures, &first);
  std::string faithful_b = SearchPipeline("faithful", &failures, &first);
  bool identical = bias_a == bias_b && faithful_a == faithful_b;
  std::size_t cases = kPythonTargets.size() * Seeds().patterns.size();
  std::ostringstream d;
  d << cases << " (target, seed pattern) pairs per provider: bias found on attempt 1 and "
    << "scored (1,1,0), faithful never found; " << failures / 2 << " failures";
  if (!first.empty()) d << " (first: " << first << ")";
  d << "; runs " << (identical ? "bit-identical" : "DIFFER");
  return {failures == 0 && identical, d.str()};
}

json Schedule(const std::string& purpose, std::vector<std::string> responses) {
  return {{"behavior", "schedule"},
          {"rules", json::array({{{"purpose", purpose}, {"match", ""},
                                  {"responses", responses}}})}};
}

Outcome MetricExactness() {
  const auto& x = Seeds().Target("luhn");
  std::vector<std::string> answers(7, x.expected_output);
  answers.insert(answers.end(), {"wrong", "also wrong", "nope"});
  Harness s({Scripted("s", Schedule("predict", answers))});
  RateResult rate = SuccessRate(s.ctx, "s", x.unit, s.config, x.id);

  EvalSample sample{x, Seeds().Pattern("lswr"),
                    DefaultBehavior(Language::kPython, Strategy::kInjectPhantom),
                    Strategy::kInjectPhantom};
  auto programs = ComposeConditions(sample, Oracle());
  json rules = json::array();
  rules.push_back({{"purpose", "predict"}, {"match", "SAFE"},
                   {"responses", {"0", "1", "0", "1", "0", "0", "1", "0", "0", "0"}}});
  rules.push_back({{"purpose", "predict"}, {"match", ""}, {"responses", {"0"}}});
  Harness r({Scripted("r", {{"behavior", "schedule"}, {"rules", rules}})});
  RiskResult risk = AdversarialRisk(r.ctx, "r", programs.at(Condition::kClean),
                                    programs.at(Condition::kAttack), r.config);

  BaselineFilter f = FilterByRates({{"low", 0.64}, {"edge", 0.65}}, 0.65);
  bool filter_ok = f.retained == std::vector<std::string>{"edge"} && f.dropped.size() == 1 &&
                   f.dropped[0].first == "low";
  bool pass = rate.n == 10 && rate.rate() == 0.7 && risk.n == 10 && risk.rate() == 0.3 &&
              filter_ok;
  std::ostringstream d;
  d << "success_rate=" << rate.correct << "/" << rate.n << "=" << rate.rate()
    << " adversarial_risk=" << risk.divergent << "/" << risk.n << "=" << risk.rate()
    << " filter keeps " << (f.retained.empty() ? "-" : f.retained[0]) << " drops "
    << (f.dropped.empty() ? "-" : f.dropped[0].first);
  return {pass, d.str()};
}

Outcome Renaming() {
  const std::vector<std::uint64_t> seeds = {1, 7, 42, 1234, 99991};
  struct Check {
    std::string id;
    CodeUnit original;
    CodeUnit renamed;
  };
  std::vector<Check> checks;
  for (std::uint64_t seed : seeds) {
    for (const auto& x : PythonTargets()) {
      checks.push_back({x.id, x.unit, RandomizeIdentifiers(x.unit, seed)});
    }
    for (const auto& p : Seeds().patterns) {
      auto renamed = RandomizeRecordIdentifiers(p, seed);
      checks.push_back({p.id + ".familiar", p.familiar, renamed.familiar});
      checks.push_back({p.id + ".deceptive", p.deceptive, renamed.deceptive});
    }
  }
  std::vector<std::string> diffs(checks.size());
  std::vector<char> changed(checks.size(), 0);
  ParallelFor(checks.size(), Jobs(), [&](std::size_t i) {
    const Check& c = checks[i];
    changed[i] = c.renamed.source != c.original.source;
    std::string a = Run(c.original);
    std::string b = Run(c.renamed);
    if (a != b) diffs[i] = c.id + ": " + a + " vs " + b;
  });
  int n_diff = 0;
  std::string first;
  for (const auto& d : diffs) {
    if (d.empty()) continue;
    if (first.empty()) first = d;
    ++n_diff;
  }
  auto n_changed = std::count(changed.begin(), changed.end(), 1);
  std::ostringstream d;
  d << checks.size() << " checks under " << seeds.size() << " seeds, " << n_changed
    << " sources renamed, " << n_diff << " output diffs";
  if (!first.empty()) d << " (first: " << first << ")";
  return {n_diff == 0 && checks.size() >= 15 && n_changed > 0, d.str()};
}

std::map<std::string, std::string> ReadAll(const std::vector<fs::path>& paths) {
  std::map<std::string, std::string> out;
  for (const auto& p : paths) out[p.filename().string()] = ReadFile(p);
  return out;
}

Outcome Replay() {
  RunConfig config = LoadRunConfig(Source() / "configs" / "scripted.json");
  config.cache_dir = Scratch("replay-cache");
  Corpus corpus = LoadRunCorpus(config);
  std::vector<EvalSample> samples = BuildSamples(config, corpus);
  auto run = [&](const fs::path& out, long* backend_calls, long* network_calls) {
    auto gateway = MakeGateway(config, Oracle(), false, AllSeedVariants());
    EvalContext ctx{gateway.get(), &Oracle(), {}};
    auto paths = RenderReport(RunEvaluation(ctx, config.eval, samples, config.campaign), out);
    *backend_calls = gateway->TotalUsage().backend_calls;
    *network_calls = gateway->NetworkCalls();
    return ReadAll(paths);
  };
  long cold_calls = 0, cold_net = 0, warm_calls = 0, warm_net = 0;
  auto cold = run(Scratch("replay-cold"), &cold_calls, &cold_net);
  auto warm = run(Scratch("replay-warm"), &warm_calls, &warm_net);
  int differing = 0;
  for (const auto& [name, bytes] : cold) {
    auto it = warm.find(name);
    if (it == warm.end() || it->second != bytes) ++differing;
  }
  bool pass = cold_calls > 0 && warm_calls == 0 && warm_net == 0 && differing == 0 &&
              cold.size() == warm.size() && !cold.empty();
  std::ostringstream d;
  d << samples.size() << " samples; cold run " << cold_calls << " backend calls, warm run "
    << warm_calls << " backend calls and " << warm_net << " network calls; " << cold.size()
    << " report files, " << differing << " differ";
  return {pass, d.str()};
}

Outcome UniversalityShape() {
  RunConfig config = LoadRunConfig(Source() / "configs" / "universality.json");
  config.cache_dir.reset();
  config.eval.jobs = Jobs();
  Corpus corpus = LoadRunCorpus(config);
  std::vector<EvalSample> samples = BuildSamples(config, corpus);
  auto gateway = MakeGateway(config, Oracle(), false, AllSeedVariants());
  EvalContext ctx{gateway.get(), &Oracle(), {}};
  EvaluationReport report = RunEvaluation(ctx, config.eval, samples, config.campaign);
  auto aggs = Aggregates(report);
  std::set<std::string> missing;
  for (const auto& p : config.providers) {
    for (Language l : {Language::kPython, Language::kC, Language::kRust, Language::kGo}) {
      for (Condition c : AllConditions()) {
        bool found = std::any_of(aggs.begin(), aggs.end(), [&](const Aggregate& a) {
          return a.provider_id == p.id && a.language == l && a.condition == c &&
                 a.samples > 0 && a.trials > 0;
        });
        if (!found) {
          missing.insert(p.id + "/" + std::string(LanguageName(l)) + "/" +
                         std::string(ConditionName(c)));
        }
      }
    }
  }
  std::string text = ReportText(report);
  bool text_ok = true;
  for (const char* s : {"python", "c ", "rust", "go", "x+P0", "x+P'", "Overall"}) {
    text_ok = text_ok && text.find(s) != std::string::npos;
  }
  std::size_t expected = config.providers.size() * 4 * 3;
  bool pass = report.layout == ReportLayout::kUniversality && missing.empty() &&
              aggs.size() == expected && text_ok;
  std::ostringstream d;
  d << "layout " << ReportLayoutName(report.layout) << ", " << aggs.size() << "/" << expected
    << " cells populated (" << config.providers.size()
    << " providers x 4 languages x 3 conditions)";
  if (!missing.empty()) d << ", missing " << *missing.begin();
  if (!text_ok) d << ", text matrix incomplete";
  return {pass, d.str()};
}

std::string DefenseSignature(const DefenseReport& a, const DefenseReport& b) {
  return DefenseCsv(a) + DefenseCsv(b);
}

Outcome DefenseOffline() {
  if (!Oracle().HasToolchain(Language::kJavaScript)) return {false, "node is not installed"};
  auto fixtures = LoadHtmlFixtures(Source() / "fixtures" / "html");
  Corpus web = LoadCorpus(Source() / "corpus" / "web");
  std::string decoy(kDefaultDecoy);
  int pages = 0, bad_pages = 0;
  std::string first_bad;
  for (const auto& f : fixtures) {
    std::string original_render = RenderText(f.html, Oracle());
    for (const auto& p : web.patterns) {
      for (DefenseArm arm : {DefenseArm::kControl, DefenseArm::kAttack}) {
        ++pages;
        ArmoredPage page = ArmorPage(f.name, f.html, p, decoy, Oracle(), arm);
        std::string render = RenderText(page.armored_html, Oracle());
        bool ok = render == original_render && !ContainsIgnoreCase(render, decoy) &&
                  page.armored_html.find(decoy) != std::string::npos &&
                  f.html.find(decoy) == std::string::npos;
        if (!ok) {
          ++bad_pages;
          if (first_bad.empty()) first_bad = f.name + "/" + p.id;
        }
      }
    }
  }

  RunConfig config = LoadRunConfig(Source() / "configs" / "defense.json");
  config.cache_dir.reset();
  config.eval.jobs = Jobs();
  Corpus corpus = LoadRunCorpus(config);
  std::vector<EvalSample> samples = BuildSamples(config, corpus);
  std::vector<DeceptionPatternRecord> known = AllSeedVariants();
  known.insert(known.end(), web.patterns.begin(), web.patterns.end());
  auto study = [&] {
    auto gateway = MakeGateway(config, Oracle(), false, known);
    EvalContext ctx{gateway.get(), &Oracle(), {}};
    DefenseReport plag = PlagiarismStudy(ctx, config.eval, samples);
    DefenseReport scrape = ScrapingStudy(ctx, config.eval, fixtures, web.patterns, decoy);
    return std::make_pair(plag, scrape);
  };
  auto [plag, scrape] = study();
  auto [plag2, scrape2] = study();
  bool deterministic = DefenseSignature(plag, scrape) == DefenseSignature(plag2, scrape2);

  // Mean defense rate per (study, provider, arm).
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto* r : {&plag, &scrape}) {
    for (const auto& row : r->results) {
      auto& s = sums[row.study + "/" + row.provider_id + "/" +
                     std::string(DefenseArmName(row.arm))];
      s.first += row.defense_rate();
      s.second += 1;
    }
  }
  auto mean = [&](const std::string& key) {
    auto it = sums.find(key);
    return it == sums.end() || it->second.second == 0 ? -1.0
                                                      : it->second.first / it->second.second;
  };
  bool fractions_ok = mean("plagiarism/bias/attack") == 1.0 &&
                      mean("plagiarism/bias/control") == 0.0 &&
                      mean("plagiarism/faithful/attack") == 0.0 &&
                      mean("scraping/bias/attack") == 1.0 &&
                      mean("scraping/bias/control") == 0.0 &&
                      mean("scraping/faithful/attack") == 0.0;
  bool text_ok = DefenseText(scrape).find("Anti web scraping") != std::string::npos &&
                 DefenseText(plag).find("Anti plagiarism") != std::string::npos;
  bool pass = pages > 0 && bad_pages == 0 && deterministic && fractions_ok && text_ok &&
              fixtures.size() >= 3;
  std::ostringstream d;
  d << fixtures.size() << " fixtures, " << pages << " armored pages, " << bad_pages
    << " render mismatches";
  if (!first_bad.empty()) d << " (first: " << first_bad << ")";
  d.precision(2);
  d << "; defense rate bias " << mean("plagiarism/bias/attack") << "/"
    << mean("scraping/bias/attack") << " faithful " << mean("plagiarism/faithful/attack")
    << "/" << mean("scraping/faithful/attack") << " (plagiarism/scraping, attack arm); "
    << (deterministic ? "deterministic" : "NOT deterministic");
  return {pass, d.str()};
}

// Passes requests through to a scripted backend and keeps a copy of each.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::unique_ptr<Backend> inner, std::vector<CompletionRequest>* log,
                   std::mutex* mu)
      : inner_(std::move(inner)), log_(log), mu_(mu) {}
  bool remote() const override { return false; }
  Completion Complete(const ProviderConfig& config, const CompletionRequest& request) override {
    {
      std::lock_guard<std::mutex> lock(*mu_);
      log_->push_back(request);
    }
    return inner_->Complete(config, request);
  }

 private:
  std::unique_ptr<Backend> inner_;
  std::vector<CompletionRequest>* log_;
  std::mutex* mu_;
};

Outcome AdaptiveHashing() {
  std::vector<CompletionRequest> log;
  std::mutex mu;
  GatewayOptions o;
  o.script.oracle = &Oracle();
  o.script.patterns = AllSeedVariants();
  LlmGateway gateway(o);
  ProviderConfig bias = Scripted("bias", {{"behavior", "bias"}});
  gateway.RegisterBackend(bias, std::make_unique<RecordingBackend>(
                                    MakeScriptedBackend(bias, o.script), &log, &mu));
  EvalContext ctx{&gateway, &Oracle(), {}};
  EvaluationConfig config;
  config.providers = {bias};
  config.n_trials = 3;
  config.jobs = Jobs();
  std::vector<EvalSample> samples;
  for (const char* t : {"luhn", "roman", "caesar"}) {
    for (const auto& p : Seeds().patterns) {
      samples.push_back({Seeds().Target(t), p,
                         DefaultBehavior(Language::kPython, Strategy::kInjectPhantom),
                         Strategy::kInjectPhantom});
    }
  }
  CampaignOptions options;
  options.adaptive = true;
  EvaluationReport report = RunEvaluation(ctx, config, samples, options);

  const std::string& warning = gateway.prompts().Get("robust_warning");
  std::set<std::string> plain, robust;
  std::size_t robust_requests = 0;
  int stray_warnings = 0;
  for (const auto& req : log) {
    if (req.purpose != Purpose::kPredict) continue;
    bool warned = !req.messages.empty() && req.messages[0].role == "system" &&
                  req.messages[0].content == warning;
    if (warned) {
      std::vector<Message> rest(req.messages.begin() + 1, req.messages.end());
      for (const auto& m : rest) stray_warnings += m.content.find(warning) != std::string::npos;
      ++robust_requests;
      robust.insert(req.sample_tag + "|" + MessagesHash(rest));
    } else {
      for (const auto& m : req.messages) {
        stray_warnings += m.content.find(warning) != std::string::npos;
      }
      plain.insert(req.sample_tag + "|" + MessagesHash(req.messages));
    }
  }
  int robust_cells = 0;
  for (const auto& c : report.cells) robust_cells += c.prompt_mode == PromptMode::kRobust;
  std::size_t expected = samples.size() * 3 * config.n_trials;
  bool pass = report.layout == ReportLayout::kAdaptive && plain == robust && !plain.empty() &&
              robust_requests == expected && stray_warnings == 0 &&
              robust_cells == static_cast<int>(samples.size() * 3) &&
              ReportText(report).find("Robust") != std::string::npos;
  std::ostringstream d;
  d << robust_requests << " Robust prediction requests (" << robust.size()
    << " distinct); hashes " << (plain == robust ? "match" : "DIFFER")
    << " once the leading warning is removed";
  return {pass, d.str()};
}

Outcome DiscoveryCurveCheck() {
  const int every = 7;
  const int total = 40;
  GatewayOptions o;
  o.script.oracle = &Oracle();
  LlmGateway gateway(o);
  gateway.Register(Scripted("miner", {{"behavior", "miner"}, {"success_every", every}}));
  GeneratorContext ctx{&gateway, "miner", &Oracle(), {}};
  SearchBudget budget = MiningBudget();
  budget.max_patterns = total;
  MiningOptions options;
  options.jobs = Jobs();
  MiningResult r = MinePatterns(ctx, budget, options);
  std::vector<int> curve = DiscoveryCurve(r.events);
  std::vector<int> expected;
  int count = 0;
  for (int i = 1; i <= total; ++i) {
    if (i % every == 0) ++count;
    expected.push_back(count);
  }
  bool monotone = std::is_sorted(curve.begin(), curve.end());
  bool pass = curve == expected && monotone &&
              r.records.size() == static_cast<std::size_t>(total / every);
  std::ostringstream d;
  d << total << " mined patterns, success every " << every << "th: curve ends at "
    << (curve.empty() ? 0 : curve.back()) << " (expected " << expected.back() << "), "
    << (monotone ? "monotone" : "NOT monotone") << ", "
    << (curve == expected ? "matches" : "DIFFERS FROM") << " the schedule";
  return {pass, d.str()};
}

}  // namespace
}  // namespace fpa

int main() {
  using fpa::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"seed-oracle-truths", fpa::SeedTruths},
      {"attack-definition-invariants", fpa::DefinitionTwo},
      {"search-pipeline-determinism", fpa::AlgorithmOne},
      {"metric-exactness", fpa::MetricExactness},
      {"identifier-randomization", fpa::Renaming},
      {"cached-replay", fpa::Replay},
      {"universality-report-shape", fpa::UniversalityShape},
      {"defense-studies-offline", fpa::DefenseOffline},
      {"adaptive-request-hashing", fpa::AdaptiveHashing},
      {"discovery-curve", fpa::DiscoveryCurveCheck},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += outcome.pass ? 0 : 1;
    std::printf("%s  %-30s %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
