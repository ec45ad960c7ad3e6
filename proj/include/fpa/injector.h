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

#ifndef FPA_INJECTOR_H_
#define FPA_INJECTOR_H_

#include <string>
#include <vector>

#include "fpa/code_unit.h"
#include "fpa/corpus.h"
#include "fpa/exec_oracle.h"

namespace fpa {

enum class Strategy { kInjectPhantom, kHideLogic, kControl };

// "inject_phantom", "hide_logic", "control".
std::string_view StrategyName(Strategy strategy);
Strategy ParseStrategy(std::string_view name);

// t: statements in the target's language, plus a note on their visible
// effect.
struct TargetBehavior {
  std::string code;
  std::string observable_effect;

  bool operator==(const TargetBehavior&) const = default;
};

// Prints `token` on its own line.
TargetBehavior SentinelBehavior(Language language, std::string_view token);

// The default t of each strategy: "SAFE" for phantom logic, "HIDDEN" for
// hidden logic, nothing for the control.
TargetBehavior DefaultBehavior(Language language, Strategy strategy);

// Source literal for a normalized output value (True -> True in Python,
// true in the others, integers and decimals verbatim, strings quoted).
// Throws InjectionError for values with no literal form in `language`.
std::string ValueLiteral(Language language, std::string_view value);

struct Guard {
  Language language = Language::kPython;
  std::string pattern_id;
  // Pattern definition prepended to the target.
  std::string definition;
  // The guarded statement placed before the final output.
  std::string text;
};

// Guard of the chosen strategy over P' (control: over the unperturbed P with
// a no-op body). Throws InjectionError when t is missing for a non-control
// strategy or when the language has no guard syntax.
Guard BuildGuard(const DeceptionPatternRecord& pattern, Strategy strategy,
                 const TargetBehavior& behavior);

// The same guard with P in place of P': x (+) (P, t).
Guard BuildUnperturbedGuard(const DeceptionPatternRecord& pattern, Strategy strategy,
                            const TargetBehavior& behavior);

// Places the pattern definition at the top of x and the guard right before
// its final output statement. When `oracle` is given the result must parse
// or compile, otherwise InjectionError carries the diagnostics.
CodeUnit Inject(const TargetProgram& x, const Guard& guard,
                const ExecOracle* oracle = nullptr);

struct AttackSample {
  TargetProgram target;
  DeceptionPatternRecord pattern;
  TargetBehavior behavior;
  Strategy strategy = Strategy::kInjectPhantom;
  CodeUnit composed;
  std::string guard_site;

  bool operator==(const AttackSample&) const = default;
};

AttackSample ComposeAttack(const TargetProgram& x, const DeceptionPatternRecord& pattern,
                           Strategy strategy, const TargetBehavior& behavior,
                           const ExecOracle& oracle);

// `<target_id>__<pattern_id>__<strategy>.<ext>`
std::string ComposedFileName(const AttackSample& sample);

// The runtime half of the attack definition for one sample.
struct RuntimeCheck {
  // exec(x') equals the intended behavior: exec(x) for phantom logic and
  // control, exec(x) with t applied for hidden logic.
  bool preserved = false;
  // Putting P back in place of P' changes behavior (always true for the
  // control, which has no t).
  bool pattern_matters = false;
  std::string intended_output;
  std::string composed_output;
  std::string unperturbed_output;
  std::vector<std::string> diagnostics;

  bool ok() const { return preserved && pattern_matters; }
};

RuntimeCheck CheckRuntime(const AttackSample& sample, const ExecOracle& oracle,
                          const ExecLimits& limits = {});

// The program whose output counts as ground truth for a sample's intended
// semantics: x itself, or x with t applied unconditionally for hidden logic.
CodeUnit IntendedProgram(const AttackSample& sample);

}  // namespace fpa

#endif  // FPA_INJECTOR_H_
