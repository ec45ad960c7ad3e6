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

// fpa: corpus checks, pattern mining, attack search, evaluation campaigns
// and the defensive studies.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpa/corpus.h"
#include "fpa/defense.h"
#include "fpa/errors.h"
#include "fpa/evaluator.h"
#include "fpa/exec_oracle.h"
#include "fpa/generator.h"
#include "fpa/injector.h"
#include "fpa/run_config.h"
#include "fpa/text_util.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fpa {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEnvironment = 3;

void PrintJson(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---- corpus validate ----

struct ValidateArgs {
  std::vector<std::string> roots;
  bool json_out = false;
};

int CorpusValidate(const ValidateArgs& args) {
  ExecOracle oracle;
  json summary = json::array();
  int problems = 0;
  for (const auto& root : args.roots) {
    LoadOptions options;
    options.oracle = &oracle;
    Corpus c = LoadCorpus(root, options);
    problems += static_cast<int>(c.problems.size());
    json issues = json::array();
    for (const auto& p : c.problems) {
      issues.push_back({{"file", p.file.string()}, {"id", p.id}, {"message", p.message}});
    }
    summary.push_back({{"root", root},
                       {"patterns", c.patterns.size()},
                       {"targets", c.targets.size()},
                       {"problems", issues}});
    if (!args.json_out) {
      std::cout << root << ": " << c.patterns.size() << " patterns, " << c.targets.size()
                << " targets valid, " << c.problems.size() << " invalid\n";
      for (const auto& p : c.problems) {
        std::cout << "  INVALID " << (p.id.empty() ? p.file.string() : p.id) << ": "
                  << p.message << "\n";
      }
    }
  }
  if (args.json_out) PrintJson(summary);
  return problems == 0 ? kExitOk : kExitFailure;
}

// ---- mine ----

struct MineArgs {
  std::string config;
  std::string provider;
  int max_patterns = 100;
  int attempts = 1;
  std::string style = "textbook";
  int jobs = 1;
  std::string out;
  std::string csv;
  bool offline = false;
  bool json_out = false;
};

std::string PickProvider(const RunConfig& config, const std::string& requested) {
  if (!requested.empty()) {
    for (const auto& p : config.providers) {
      if (p.id == requested) return requested;
    }
    throw UsageError("provider '" + requested + "' is not in the config");
  }
  if (config.providers.size() != 1) {
    throw UsageError("the config lists several providers; choose one with --provider");
  }
  return config.providers[0].id;
}

int Mine(const MineArgs& args) {
  RunConfig config = LoadRunConfig(args.config);
  SearchBudget budget{args.attempts, ParsePatternStyle(args.style), args.max_patterns};
  CheckBudget(budget);
  std::string provider = PickProvider(config, args.provider);
  ExecOracle oracle;
  Corpus corpus = LoadRunCorpus(config);
  auto gateway = MakeGateway(config, oracle, args.offline, corpus.patterns);
  GeneratorContext ctx{gateway.get(), provider, &oracle, {}};
  MiningOptions options;
  options.jobs = args.jobs;
  if (!args.out.empty()) options.corpus_root = fs::path(args.out);
  MiningResult result = MinePatterns(ctx, budget, options);
  std::string csv = DiscoveryCsv(result.events);
  if (!args.csv.empty()) WriteFile(args.csv, csv);
  auto curve = DiscoveryCurve(result.events);
  int duplicates = 0;
  for (const auto& e : result.events) duplicates += e.duplicate ? 1 : 0;
  json summary = {{"provider", provider},
                  {"patterns_tried", result.events.size()},
                  {"unique_successes", result.records.size()},
                  {"duplicates", duplicates},
                  {"perturbation_attempts", budget.perturbation_attempts},
                  {"llm_calls", gateway->Usage(provider).requests}};
  if (args.json_out) {
    PrintJson(summary);
  } else {
    std::cout << "mined " << result.records.size() << " unique deception patterns from "
              << result.events.size() << " candidates (n=" << budget.perturbation_attempts
              << ", " << duplicates << " duplicates)\n";
    for (const auto& r : result.records) std::cout << "  " << r.id << "\n";
    if (args.csv.empty()) std::cout << csv;
  }
  return kExitOk;
}

// ---- attack ----

struct AttackArgs {
  std::string target;
  std::string pattern;
  std::string strategy = "inject_phantom";
  std::string token;
  std::vector<std::string> corpus = {"corpus/seed"};
  std::string out;
  std::string config;
  std::string provider;
  int attempts = 5;
  bool offline = false;
  bool json_out = false;
};

TargetProgram ResolveTarget(const std::string& spec, const Corpus& corpus) {
  if (fs::is_regular_file(spec)) return LoadTargetFile(spec);
  return corpus.Target(spec);
}

int Attack(const AttackArgs& args) {
  std::vector<fs::path> roots(args.corpus.begin(), args.corpus.end());
  Corpus corpus = LoadCorpora(roots);
  TargetProgram x = ResolveTarget(args.target, corpus);
  Strategy strategy = ParseStrategy(args.strategy);
  TargetBehavior t = args.token.empty() ? DefaultBehavior(x.unit.language, strategy)
                                        : SentinelBehavior(x.unit.language, args.token);
  ExecOracle oracle;
  json summary;
  bool ok = true;
  std::optional<AttackSample> sample;

  if (!args.config.empty()) {
    RunConfig config = LoadRunConfig(args.config);
    std::string provider = PickProvider(config, args.provider);
    auto gateway = MakeGateway(config, oracle, args.offline, corpus.patterns);
    GeneratorContext ctx{gateway.get(), provider, &oracle, {}};
    std::vector<DeceptionPatternRecord> candidates;
    if (!args.pattern.empty()) {
      candidates.push_back(corpus.Pattern(args.pattern));
    } else {
      for (const auto& p : corpus.patterns) {
        if (p.language() == x.unit.language) candidates.push_back(p);
      }
    }
    SearchBudget budget = TargetedBudget();
    budget.perturbation_attempts = args.attempts;
    SearchOutcome outcome = RunFpaSearch(ctx, x, strategy, t, candidates, budget);
    summary["search"] = {{"provider", provider},
                         {"succeeded", outcome.sample.has_value()},
                         {"attempts", outcome.attempts},
                         {"predicted_output", outcome.predicted_output},
                         {"actual_output", outcome.actual_output}};
    if (!outcome.sample) {
      ok = false;
    } else {
      sample = outcome.sample;
    }
  } else {
    if (args.pattern.empty()) throw UsageError("--pattern is required without --config");
    sample = ComposeAttack(x, corpus.Pattern(args.pattern), strategy, t, oracle);
  }

  if (sample) {
    RuntimeCheck check = CheckRuntime(*sample, oracle);
    summary["target"] = x.id;
    summary["pattern"] = sample->pattern.id;
    summary["strategy"] = StrategyName(strategy);
    summary["preserved"] = check.preserved;
    summary["pattern_matters"] = check.pattern_matters;
    summary["intended_output"] = check.intended_output;
    summary["composed_output"] = check.composed_output;
    summary["unperturbed_output"] = check.unperturbed_output;
    summary["diagnostics"] = check.diagnostics;
    ok = ok && check.ok();
    if (!args.out.empty()) {
      fs::path file = fs::path(args.out) / ComposedFileName(*sample);
      WriteFile(file, AssembleProgram(sample->composed));
      summary["written"] = file.string();
    }
    if (!args.json_out) {
      std::cout << "x' = " << x.id << " + " << sample->pattern.id << " ("
                << StrategyName(strategy) << ")\n";
      std::cout << "oracle equivalence: " << (check.preserved ? "PASS" : "FAIL")
                << "  exec(x') matches the intended behavior\n";
      std::cout << "behavior change:    " << (check.pattern_matters ? "PASS" : "FAIL")
                << "  exec(x with P) differs from exec(x')\n";
      for (const auto& d : check.diagnostics) std::cout << "  " << d << "\n";
      if (summary.contains("written")) {
        std::cout << "wrote " << summary["written"].get<std::string>() << "\n";
      } else {
        std::cout << "\n" << AssembleProgram(sample->composed);
      }
    }
  }
  if (summary.contains("search") && !args.json_out) {
    const json& s = summary["search"];
    std::cout << "search: " << (s["succeeded"].get<bool>() ? "succeeded" : "failed")
              << " after " << s["attempts"].get<int>() << " attempt(s)\n";
  }
  if (args.json_out) PrintJson(summary);
  return ok ? kExitOk : kExitFailure;
}

// ---- eval ----

struct EvalArgs {
  std::string config;
  bool robust = false;
  bool adaptive = false;
  std::string conditions;
  bool offline = false;
  int jobs = 0;
  int n_trials = 0;
  std::string out;
  std::optional<std::uint64_t> ablation_seed;
  bool json_out = false;
};

std::string UtcNow() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void WriteRunLog(const fs::path& dir, const LlmGateway& gateway, bool offline,
                 const std::optional<fs::path>& cache) {
  UsageTotals u = gateway.TotalUsage();
  json log = {{"timestamp", UtcNow()},
              {"offline", offline},
              {"cache_dir", cache ? json(cache->string()) : json(nullptr)},
              {"requests", u.requests},
              {"cache_hits", u.cache_hits},
              {"backend_calls", u.backend_calls},
              {"network_calls", gateway.NetworkCalls()},
              {"input_tokens", u.input_tokens},
              {"output_tokens", u.output_tokens}};
  WriteFile(dir / "run_log.json", log.dump(2) + "\n");
}

json CommandManifest(const std::string& command, const RunConfig& config,
                     const std::vector<std::string>& flags) {
  return {{"command", command}, {"flags", flags}, {"config_sha256", config.file_hash}};
}

int Eval(const EvalArgs& args, const std::vector<std::string>& flags) {
  RunConfig config = LoadRunConfig(args.config);
  if (args.robust) config.eval.prompt_mode = PromptMode::kRobust;
  if (args.adaptive) config.campaign.adaptive = true;
  if (!args.conditions.empty()) {
    config.eval.conditions.clear();
    std::stringstream list(args.conditions);
    for (std::string name; std::getline(list, name, ',');) {
      config.eval.conditions.push_back(ParseCondition(std::string(Trim(name))));
    }
  }
  if (args.jobs > 0) config.eval.jobs = args.jobs;
  if (args.n_trials > 0) config.eval.n_trials = args.n_trials;
  if (args.ablation_seed) config.campaign.ablation_seed = args.ablation_seed;
  CheckConfig(config.eval);
  fs::path out = args.out.empty() ? config.output_dir : fs::path(args.out);

  ExecOracle oracle;
  Corpus corpus = LoadRunCorpus(config);
  auto samples = BuildSamples(config, corpus);
  auto gateway = MakeGateway(config, oracle, args.offline, corpus.patterns);
  EvalContext ctx{gateway.get(), &oracle, {}};
  EvaluationReport report = RunEvaluation(ctx, config.eval, samples, config.campaign);
  report.manifest["run"] = CommandManifest("eval", config, flags);
  RenderReport(report, out);
  WriteRunLog(out, *gateway, args.offline, config.cache_dir);

  if (args.json_out) {
    json aggs = json::array();
    for (const auto& a : Aggregates(report)) {
      aggs.push_back({{"provider", a.provider_id},
                      {"language", LanguageName(a.language)},
                      {"prompt_mode", PromptModeName(a.prompt_mode)},
                      {"arm", a.arm},
                      {"condition", ConditionName(a.condition)},
                      {"macro", a.macro},
                      {"micro", a.micro}});
    }
    PrintJson({{"output_dir", out.string()}, {"aggregates", aggs}});
  } else {
    std::cout << ReportText(report) << "\nwrote " << out.string() << "\n";
  }
  return kExitOk;
}

// ---- defend ----

struct DefendArgs {
  std::string study;
  std::string config;
  std::string fixtures;
  std::string armored_dir;
  std::string out;
  bool offline = false;
  int jobs = 0;
  int n_trials = 0;
  bool json_out = false;
};

int Defend(const DefendArgs& args, const std::vector<std::string>& flags) {
  RunConfig config = LoadRunConfig(args.config);
  if (args.jobs > 0) config.eval.jobs = args.jobs;
  if (args.n_trials > 0) config.eval.n_trials = args.n_trials;
  fs::path out = args.out.empty() ? config.output_dir : fs::path(args.out);
  ExecOracle oracle;
  Corpus corpus = LoadRunCorpus(config);
  std::vector<DeceptionPatternRecord> web;
  if (!config.defense.patterns.empty()) web = LoadCorpus(config.defense.patterns).patterns;
  std::vector<DeceptionPatternRecord> all = corpus.patterns;
  all.insert(all.end(), web.begin(), web.end());
  auto gateway = MakeGateway(config, oracle, args.offline, all);
  EvalContext ctx{gateway.get(), &oracle, {}};

  DefenseReport report;
  if (args.study == "plagiarism") {
    report = PlagiarismStudy(ctx, config.eval, BuildSamples(config, corpus));
  } else {
    if (!oracle.HasToolchain(Language::kJavaScript)) {
      throw EnvironmentError("the scraping study needs a javascript runtime (node)");
    }
    fs::path fixtures_dir = args.fixtures.empty() ? config.defense.fixtures : fs::path(args.fixtures);
    if (fixtures_dir.empty()) throw UsageError("no fixtures: set defense.fixtures or --fixtures");
    auto fixtures = LoadHtmlFixtures(fixtures_dir);
    report = ScrapingStudy(ctx, config.eval, fixtures, web, config.defense.decoy);
    const DeceptionPatternRecord* armor = nullptr;
    for (const auto& p : web) {
      if (p.id == config.defense.armor_pattern) armor = &p;
    }
    if (!armor && !fixtures.empty()) {
      throw UsageError("armor pattern '" + config.defense.armor_pattern +
                       "' is not among the defense patterns");
    }
    std::optional<fs::path> dir;
    if (!args.armored_dir.empty()) dir = fs::path(args.armored_dir);
    for (const auto& f : fixtures) {
      ArmoredPage page = ArmorPage(f.name, f.html, *armor, config.defense.decoy, oracle);
      fs::path file = ArmoredPath(f.path, dir);
      WriteFile(file, page.armored_html);
    }
  }
  report.manifest["run"] = CommandManifest("defend " + args.study, config, flags);
  RenderDefenseReport(report, out);
  WriteRunLog(out, *gateway, args.offline, config.cache_dir);
  if (args.json_out) {
    json rows = json::array();
    for (const auto& r : report.results) {
      rows.push_back({{"provider", r.provider_id}, {"sample", r.sample_id},
                      {"arm", DefenseArmName(r.arm)}, {"defense_rate", r.defense_rate()}});
    }
    PrintJson({{"output_dir", out.string()}, {"results", rows}});
  } else {
    std::cout << DefenseText(report) << "\nwrote " << out.string() << "\n";
  }
  return kExitOk;
}

int ExitCodeFor(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const EnvironmentError& err) {
    std::cerr << "environment error: " << err.what() << "\n";
    return kExitEnvironment;
  } catch (const AuthError& err) {
    std::cerr << "credentials error: " << err.what() << "\n";
    return kExitEnvironment;
  } catch (const OfflineError& err) {
    std::cerr << "offline: " << err.what() << "\n";
    return kExitEnvironment;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace

// Flags recorded in report manifests. Output location and parallelism do
// not change results, so they are left out.
std::vector<std::string> ManifestFlags(int argc, char** argv) {
  static const std::set<std::string> kSkip = {"--out", "--jobs", "--armored-dir"};
  std::vector<std::string> flags;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    std::string name = arg.substr(0, arg.find('='));
    if (kSkip.count(name)) {
      if (arg.find('=') == std::string::npos) ++i;
      continue;
    }
    flags.push_back(arg);
  }
  return flags;
}

int Main(int argc, char** argv) {
  CLI::App app{"Familiar pattern attack toolkit"};
  app.require_subcommand(1);
  std::vector<std::string> flags = ManifestFlags(argc, argv);

  auto* corpus = app.add_subcommand("corpus", "Corpus operations");
  corpus->require_subcommand(1);
  ValidateArgs validate;
  auto* validate_cmd = corpus->add_subcommand("validate", "Re-execute and check every record");
  validate_cmd->add_option("roots", validate.roots, "Corpus directories")->required();
  validate_cmd->add_flag("--json", validate.json_out, "Machine-readable summary");

  MineArgs mine;
  auto* mine_cmd = app.add_subcommand("mine", "Generate, perturb and validate patterns");
  mine_cmd->add_option("--config", mine.config, "Campaign config file")->required();
  mine_cmd->add_option("--provider", mine.provider, "Provider id from the config");
  mine_cmd->add_option("--max-patterns", mine.max_patterns, "Familiar patterns to try")
      ->check(CLI::NonNegativeNumber);
  mine_cmd->add_option("-n,--attempts", mine.attempts, "Perturbations per pattern")
      ->check(CLI::PositiveNumber);
  mine_cmd->add_option("--style", mine.style, "textbook or real_world");
  mine_cmd->add_option("--jobs", mine.jobs, "Concurrent candidates")->check(CLI::PositiveNumber);
  mine_cmd->add_option("--out", mine.out, "Corpus directory for unique successes");
  mine_cmd->add_option("--csv", mine.csv, "Discovery curve CSV path");
  mine_cmd->add_flag("--offline", mine.offline, "Fail on any network call");
  mine_cmd->add_flag("--json", mine.json_out, "Machine-readable summary");

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "Compose and verify x'");
  attack_cmd->add_option("target", attack.target, "Target id or target JSON file")->required();
  attack_cmd->add_option("--pattern", attack.pattern, "Deception pattern id");
  attack_cmd->add_option("--strategy", attack.strategy, "inject_phantom, hide_logic or control");
  attack_cmd->add_option("--token", attack.token, "Sentinel printed by t");
  attack_cmd->add_option("--corpus", attack.corpus, "Corpus directories");
  attack_cmd->add_option("--out", attack.out, "Directory for the composed program");
  attack_cmd->add_option("--config", attack.config, "Run the targeted search with this config");
  attack_cmd->add_option("--provider", attack.provider, "Provider id for the search");
  attack_cmd->add_option("-n,--attempts", attack.attempts, "Perturbations per candidate")
      ->check(CLI::PositiveNumber);
  attack_cmd->add_flag("--offline", attack.offline, "Fail on any network call");
  attack_cmd->add_flag("--json", attack.json_out, "Machine-readable summary");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Run an evaluation campaign");
  eval_cmd->add_option("config", eval.config, "Campaign config file")->required();
  eval_cmd->add_flag("--robust", eval.robust, "Prepend the attack warning to every prompt");
  eval_cmd->add_flag("--adaptive", eval.adaptive, "Run plain and robust prompts side by side");
  eval_cmd->add_option("--conditions", eval.conditions, "Comma-separated subset of clean,control,attack");
  eval_cmd->add_flag("--offline", eval.offline, "Fail on any network call");
  eval_cmd->add_option("--jobs", eval.jobs, "Concurrent evaluations")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--n-trials", eval.n_trials, "Trials per cell")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--ablation-seed", eval.ablation_seed, "Add an identifier-randomized arm");
  eval_cmd->add_option("--out", eval.out, "Report directory");
  eval_cmd->add_flag("--json", eval.json_out, "Machine-readable summary");

  DefendArgs defend;
  auto* defend_cmd = app.add_subcommand("defend", "Defensive case studies");
  defend_cmd->add_option("study", defend.study, "plagiarism or scrape")
      ->required()
      ->check(CLI::IsMember({"plagiarism", "scrape"}));
  defend_cmd->add_option("config", defend.config, "Campaign config file")->required();
  defend_cmd->add_option("--fixtures", defend.fixtures, "HTML fixture directory");
  defend_cmd->add_option("--armored-dir", defend.armored_dir,
                         "Where armored pages go (default: next to the originals)");
  defend_cmd->add_option("--out", defend.out, "Report directory");
  defend_cmd->add_flag("--offline", defend.offline, "Fail on any network call");
  defend_cmd->add_option("--jobs", defend.jobs, "Concurrent evaluations")->check(CLI::PositiveNumber);
  defend_cmd->add_option("--n-trials", defend.n_trials, "Trials per cell")->check(CLI::PositiveNumber);
  defend_cmd->add_flag("--json", defend.json_out, "Machine-readable summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) return CorpusValidate(validate);
    if (mine_cmd->parsed()) return Mine(mine);
    if (attack_cmd->parsed()) return Attack(attack);
    if (eval_cmd->parsed()) return Eval(eval, flags);
    if (defend_cmd->parsed()) return Defend(defend, flags);
  } catch (...) {
    return ExitCodeFor(std::current_exception());
  }
  return kExitUsage;
}

}  // namespace fpa

int main(int argc, char** argv) { return fpa::Main(argc, argv); }
