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

#include "fpa/injector.h"

#include <gtest/gtest.h>

#include "fpa/errors.h"
#include "fpa/text_util.h"
#include "test_paths.h"

namespace fpa {
namespace {

using ::fpa::testing::CorpusDir;

ExecOracle& Oracle() {
  static ExecOracle oracle;
  return oracle;
}

const Corpus& AllCorpora() {
  static Corpus c =
      LoadCorpora({CorpusDir("seed"), CorpusDir("universality"), CorpusDir("web")});
  return c;
}

TEST(InjectorTest, PhantomGuardComparesToFamiliarValue) {
  const auto& vowel = AllCorpora().Pattern("vowel");
  Guard g = BuildGuard(vowel, Strategy::kInjectPhantom,
                       DefaultBehavior(Language::kPython, Strategy::kInjectPhantom));
  EXPECT_EQ(g.text, "if is_vowel('u') == True:\n    print(\"SAFE\")\n");
  EXPECT_EQ(g.definition, vowel.deceptive.source);
}

TEST(InjectorTest, HideGuardComparesToActualValue) {
  const auto& vowel = AllCorpora().Pattern("vowel");
  Guard g = BuildGuard(vowel, Strategy::kHideLogic,
                       DefaultBehavior(Language::kPython, Strategy::kHideLogic));
  EXPECT_EQ(g.text, "if is_vowel('u') == False:\n    print(\"HIDDEN\")\n");
}

TEST(InjectorTest, ControlUsesFamiliarPatternWithNoOpBody) {
  const auto& vowel = AllCorpora().Pattern("vowel");
  Guard g = BuildGuard(vowel, Strategy::kControl, {});
  EXPECT_EQ(g.text, "if is_vowel('u') == True:\n    pass\n");
  EXPECT_EQ(g.definition, vowel.familiar.source);
}

TEST(InjectorTest, MissingBehaviorRejected) {
  const auto& vowel = AllCorpora().Pattern("vowel");
  EXPECT_THROW(BuildGuard(vowel, Strategy::kInjectPhantom, {}), InjectionError);
}

TEST(InjectorTest, GuardSyntaxPerLanguage) {
  TargetBehavior safe_c = SentinelBehavior(Language::kC, "SAFE");
  EXPECT_EQ(BuildGuard(AllCorpora().Pattern("vowel-c"), Strategy::kInjectPhantom, safe_c).text,
            "if (is_vowel('u') == true) {\n    puts(\"SAFE\");\n}\n");
  TargetBehavior safe_go = SentinelBehavior(Language::kGo, "SAFE");
  EXPECT_EQ(BuildGuard(AllCorpora().Pattern("lswr-go"), Strategy::kInjectPhantom, safe_go).text,
            "if lswr(\"pwwkew\") == 3 {\n\tfmt.Println(\"SAFE\")\n}\n");
  TargetBehavior safe_rs = SentinelBehavior(Language::kRust, "SAFE");
  EXPECT_EQ(
      BuildGuard(AllCorpora().Pattern("fastpow-rust"), Strategy::kInjectPhantom, safe_rs).text,
      "if fast_power(3, 4, None) == 81 {\n    println!(\"SAFE\");\n}\n");
}

TEST(InjectorTest, ValueLiterals) {
  EXPECT_EQ(ValueLiteral(Language::kPython, "True"), "True");
  EXPECT_EQ(ValueLiteral(Language::kPython, "abc"), "\"abc\"");
  EXPECT_EQ(ValueLiteral(Language::kC, "-12"), "-12");
  EXPECT_EQ(ValueLiteral(Language::kGo, "say \"hi\""), "\"say \\\"hi\\\"\"");
  EXPECT_THROW(ValueLiteral(Language::kC, "[1 2]"), InjectionError);
}

TEST(InjectorTest, LanguageMismatchRejected) {
  Guard g = BuildGuard(AllCorpora().Pattern("vowel-c"), Strategy::kInjectPhantom,
                       SentinelBehavior(Language::kC, "SAFE"));
  EXPECT_THROW(Inject(AllCorpora().Target("email_check"), g), InjectionError);
}

TEST(InjectorTest, NameCollisionRejected) {
  TargetProgram x = AllCorpora().Target("email_check");
  x.unit.source = "def is_vowel(c):\n    return False\n" + x.unit.source;
  Guard g = BuildGuard(AllCorpora().Pattern("vowel"), Strategy::kInjectPhantom,
                       SentinelBehavior(Language::kPython, "SAFE"));
  EXPECT_THROW(Inject(x, g), InjectionError);
}

TEST(InjectorTest, NonParsingCompositionRejected) {
  TargetBehavior broken{"print(\"SAFE\"", "broken"};
  Guard g = BuildGuard(AllCorpora().Pattern("vowel"), Strategy::kInjectPhantom, broken);
  EXPECT_THROW(Inject(AllCorpora().Target("email_check"), g, &Oracle()), InjectionError);
}

TEST(InjectorTest, InjectionOnlyInsertsLines) {
  const TargetProgram& x = AllCorpora().Target("caesar");
  AttackSample s = ComposeAttack(x, AllCorpora().Pattern("lswr"), Strategy::kInjectPhantom,
                                 DefaultBehavior(Language::kPython, Strategy::kInjectPhantom),
                                 Oracle());
  EXPECT_TRUE(EndsWith(s.composed.source, x.unit.source));
  EXPECT_EQ(s.composed.invocation, x.unit.invocation);
  EXPECT_EQ(ComposedFileName(s), "caesar__lswr__inject_phantom.py");
  EXPECT_NE(s.guard_site.find("line"), std::string::npos);
}

TEST(InjectorTest, VowelStrategiesAtRuntime) {
  const TargetProgram& x = AllCorpora().Target("palindrome");
  const auto& vowel = AllCorpora().Pattern("vowel");
  for (Strategy st : {Strategy::kInjectPhantom, Strategy::kHideLogic, Strategy::kControl}) {
    AttackSample s =
        ComposeAttack(x, vowel, st, DefaultBehavior(Language::kPython, st), Oracle());
    RuntimeCheck c = CheckRuntime(s, Oracle());
    EXPECT_TRUE(c.ok()) << StrategyName(st);
    if (st == Strategy::kHideLogic) {
      EXPECT_EQ(c.composed_output, "HIDDEN\n" + x.expected_output);
    } else {
      EXPECT_EQ(c.composed_output, x.expected_output);
    }
    if (st == Strategy::kInjectPhantom) {
      EXPECT_EQ(c.unperturbed_output, "SAFE\n" + x.expected_output);
    }
  }
}

}  // namespace
}  // namespace fpa
