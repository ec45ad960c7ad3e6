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

// Python bindings: corpus access, execution, composition, renaming, metrics,
// armoring and whole campaigns from a config file.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fpa/corpus.h"
#include "fpa/defense.h"
#include "fpa/errors.h"
#include "fpa/evaluator.h"
#include "fpa/exec_oracle.h"
#include "fpa/html.h"
#include "fpa/injector.h"
#include "fpa/renamer.h"
#include "fpa/run_config.h"

namespace py = pybind11;

namespace fpa {
namespace {

CodeUnit MakeUnit(const std::string& language, std::string source, std::string invocation,
                  std::string prelude) {
  CodeUnit u;
  u.language = ParseLanguage(language);
  u.source = std::move(source);
  u.invocation = std::move(invocation);
  u.prelude = std::move(prelude);
  return u;
}

DefenseArm ParseArm(const std::string& name) {
  if (name == "attack") return DefenseArm::kAttack;
  if (name == "control") return DefenseArm::kControl;
  throw UsageError("unknown arm '" + name + "' (expected attack or control)");
}

// Runs the campaign described by `config_path` and writes the report files.
std::vector<std::filesystem::path> Evaluate(const std::filesystem::path& config_path,
                                            const std::optional<std::filesystem::path>& out,
                                            std::optional<int> n_trials,
                                            std::optional<int> jobs, bool offline) {
  RunConfig config = LoadRunConfig(config_path);
  if (n_trials) config.eval.n_trials = *n_trials;
  if (jobs) config.eval.jobs = *jobs;
  CheckConfig(config.eval);
  Corpus corpus = LoadRunCorpus(config);
  std::vector<EvalSample> samples = BuildSamples(config, corpus);
  ExecOracle oracle;
  auto gateway = MakeGateway(config, oracle, offline, corpus.patterns);
  EvalContext ctx{gateway.get(), &oracle, {}};
  EvaluationReport report = RunEvaluation(ctx, config.eval, samples, config.campaign);
  return RenderReport(report, out.value_or(config.output_dir));
}

}  // namespace
}  // namespace fpa

PYBIND11_MODULE(_core, m) {
  using namespace fpa;
  m.doc() = "Familiar pattern attack toolkit";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", error);
  py::register_exception<EnvironmentError>(m, "EnvironmentError", error);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", error);
  py::register_exception<InjectionError>(m, "InjectionError", validation);
  py::register_exception<NotComparableError>(m, "NotComparableError", error);
  py::register_exception<RenameError>(m, "RenameError", error);
  auto provider = py::register_exception<ProviderError>(m, "ProviderError", error);
  py::register_exception<AuthError>(m, "AuthError", provider);
  py::register_exception<RateLimitError>(m, "RateLimitError", provider);
  py::register_exception<MalformedResponseError>(m, "MalformedResponseError", provider);
  py::register_exception<TransientError>(m, "TransientError", provider);
  py::register_exception<OfflineError>(m, "OfflineError", provider);
  py::register_exception<UnparseableError>(m, "UnparseableError", error);
  py::register_exception<BudgetExhaustedError>(m, "BudgetExhaustedError", error);

  py::class_<CodeUnit>(m, "CodeUnit")
      .def(py::init(&MakeUnit), py::arg("language"), py::arg("source"),
           py::arg("invocation"), py::arg("prelude") = "")
      .def_property_readonly("language",
                             [](const CodeUnit& u) { return std::string(LanguageName(u.language)); })
      .def_readonly("source", &CodeUnit::source)
      .def_readonly("invocation", &CodeUnit::invocation)
      .def_readonly("prelude", &CodeUnit::prelude)
      .def("program", &AssembleProgram)
      .def("__eq__", [](const CodeUnit& a, const CodeUnit& b) { return a == b; })
      .def("__repr__", [](const CodeUnit& u) {
        return "<CodeUnit " + std::string(LanguageName(u.language)) + " " + u.invocation + ">";
      });

  py::class_<ExecResult>(m, "ExecResult")
      .def_property_readonly("status",
                             [](const ExecResult& r) { return std::string(ExecStatusName(r.status)); })
      .def_readonly("stdout", &ExecResult::stdout_normalized)
      .def_readonly("stderr", &ExecResult::stderr_text)
      .def_readonly("exit_code", &ExecResult::exit_code)
      .def_property_readonly("ok", &ExecResult::ok)
      .def("__repr__", &ExecResult::Describe);

  py::class_<ExecOracle>(m, "ExecOracle")
      .def(py::init<>())
      .def(
          "execute",
          [](const ExecOracle& o, const CodeUnit& unit, int timeout_ms) {
            ExecLimits limits;
            limits.wall_timeout = std::chrono::milliseconds(timeout_ms);
            return o.Execute(unit, limits);
          },
          py::arg("unit"), py::arg("timeout_ms") = 10000,
          py::call_guard<py::gil_scoped_release>())
      .def(
          "has_toolchain",
          [](const ExecOracle& o, const std::string& language) {
            return o.HasToolchain(ParseLanguage(language));
          },
          py::arg("language"));

  py::class_<DeceptionPatternRecord>(m, "PatternRecord")
      .def_readonly("id", &DeceptionPatternRecord::id)
      .def_readonly("familiar", &DeceptionPatternRecord::familiar)
      .def_readonly("deceptive", &DeceptionPatternRecord::deceptive)
      .def_readonly("delta_description", &DeceptionPatternRecord::delta_description)
      .def_readonly("familiar_value", &DeceptionPatternRecord::familiar_value)
      .def_readonly("actual_value", &DeceptionPatternRecord::actual_value)
      .def_property_readonly("origin", [](const DeceptionPatternRecord& r) {
        return std::string(OriginName(r.origin));
      });

  py::class_<TargetProgram>(m, "TargetProgram")
      .def_readonly("id", &TargetProgram::id)
      .def_readonly("unit", &TargetProgram::unit)
      .def_readonly("expected_output", &TargetProgram::expected_output)
      .def_readonly("domain_tag", &TargetProgram::domain_tag);

  py::class_<Corpus>(m, "Corpus")
      .def_readonly("patterns", &Corpus::patterns)
      .def_readonly("targets", &Corpus::targets)
      .def_property_readonly("problems",
                             [](const Corpus& c) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& p : c.problems) {
                                 out.emplace_back(p.file.string(), p.message);
                               }
                               return out;
                             })
      .def("pattern", &Corpus::Pattern, py::arg("id"), py::return_value_policy::copy)
      .def("target", &Corpus::Target, py::arg("id"), py::return_value_policy::copy);

  m.def(
      "load_corpus",
      [](const std::filesystem::path& root, const ExecOracle* oracle) {
        LoadOptions options;
        options.oracle = oracle;
        return LoadCorpus(root, options);
      },
      py::arg("root"), py::arg("oracle") = nullptr, py::call_guard<py::gil_scoped_release>());
  m.def("load_record", &LoadRecordFile, py::arg("path"));
  m.def("load_target", &LoadTargetFile, py::arg("path"));

  py::class_<AttackSample>(m, "AttackSample")
      .def_readonly("target", &AttackSample::target)
      .def_readonly("pattern", &AttackSample::pattern)
      .def_readonly("composed", &AttackSample::composed)
      .def_readonly("guard_site", &AttackSample::guard_site)
      .def_property_readonly("strategy", [](const AttackSample& s) {
        return std::string(StrategyName(s.strategy));
      });

  m.def(
      "compose_attack",
      [](const TargetProgram& target, const DeceptionPatternRecord& pattern,
         const ExecOracle& oracle, const std::string& strategy) {
        Strategy s = ParseStrategy(strategy);
        return ComposeAttack(target, pattern, s, DefaultBehavior(target.unit.language, s),
                             oracle);
      },
      py::arg("target"), py::arg("pattern"), py::arg("oracle"),
      py::arg("strategy") = "inject_phantom", py::call_guard<py::gil_scoped_release>());
  m.def(
      "check_runtime",
      [](const AttackSample& sample, const ExecOracle& oracle) {
        RuntimeCheck rc = CheckRuntime(sample, oracle);
        py::gil_scoped_acquire gil;
        py::dict d;
        d["preserved"] = rc.preserved;
        d["pattern_matters"] = rc.pattern_matters;
        d["intended_output"] = rc.intended_output;
        d["composed_output"] = rc.composed_output;
        d["unperturbed_output"] = rc.unperturbed_output;
        d["diagnostics"] = rc.diagnostics;
        return d;
      },
      py::arg("sample"), py::arg("oracle"), py::call_guard<py::gil_scoped_release>());

  m.def("randomize_identifiers", &RandomizeIdentifiers, py::arg("unit"), py::arg("seed"));
  m.def("randomize_record", &RandomizeRecordIdentifiers, py::arg("record"), py::arg("seed"));

  m.def("perturbation_cost", &PerturbationCost, py::arg("record"));
  m.def(
      "token_edit_distance",
      [](const std::string& language, const std::string& a, const std::string& b) {
        return TokenEditDistance(ParseLanguage(language), a, b);
      },
      py::arg("language"), py::arg("a"), py::arg("b"));
  m.def(
      "filter_by_rates",
      [](const std::vector<std::pair<std::string, double>>& rates, double threshold) {
        BaselineFilter f = FilterByRates(rates, threshold);
        return std::make_pair(f.retained, f.dropped);
      },
      py::arg("rates"), py::arg("threshold"));

  py::class_<ArmoredPage>(m, "ArmoredPage")
      .def_readonly("name", &ArmoredPage::name)
      .def_readonly("pattern_id", &ArmoredPage::pattern_id)
      .def_readonly("decoy", &ArmoredPage::decoy_content)
      .def_readonly("script", &ArmoredPage::pattern_script)
      .def_readonly("original_html", &ArmoredPage::original_html)
      .def_readonly("armored_html", &ArmoredPage::armored_html)
      .def_readonly("render_truth", &ArmoredPage::render_truth);

  m.attr("DEFAULT_DECOY") = std::string(kDefaultDecoy);
  m.def(
      "armor_page",
      [](const std::string& name, const std::string& html, const DeceptionPatternRecord& pattern,
         const ExecOracle& oracle, const std::string& decoy, const std::string& arm) {
        return ArmorPage(name, html, pattern, decoy, oracle, ParseArm(arm));
      },
      py::arg("name"), py::arg("html"), py::arg("pattern"), py::arg("oracle"),
      py::arg("decoy") = std::string(kDefaultDecoy), py::arg("arm") = "attack",
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "render_text",
      [](const std::string& html, const ExecOracle& oracle) { return RenderText(html, oracle); },
      py::arg("html"), py::arg("oracle"), py::call_guard<py::gil_scoped_release>());

  m.def("evaluate", &Evaluate, py::arg("config"), py::arg("out") = std::nullopt,
        py::arg("n_trials") = std::nullopt, py::arg("jobs") = std::nullopt,
        py::arg("offline") = true, py::call_guard<py::gil_scoped_release>());
}
