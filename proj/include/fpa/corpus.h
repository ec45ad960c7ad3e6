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

#ifndef FPA_CORPUS_H_
#define FPA_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fpa/code_unit.h"
#include "fpa/exec_oracle.h"

namespace fpa {

enum class Origin { kSeed, kMined };

std::string_view OriginName(Origin origin);
Origin ParseOrigin(std::string_view name);

// A familiar pattern P and its perturbed variant P' evaluated on the same
// hard-coded input. familiar_value is exec(P), actual_value is exec(P').
struct DeceptionPatternRecord {
  std::string id;
  CodeUnit familiar;
  CodeUnit deceptive;
  std::string delta_description;
  std::string familiar_value;
  std::string actual_value;
  Origin origin = Origin::kSeed;
  std::optional<std::string> source_model;

  Language language() const { return familiar.language; }
  bool operator==(const DeceptionPatternRecord&) const = default;
};

struct TargetProgram {
  std::string id;
  CodeUnit unit;
  std::string expected_output;
  std::string domain_tag;

  bool operator==(const TargetProgram&) const = default;
};

// Structural checks that need no execution. Throws ValidationError naming
// the violated field.
void CheckRecordShape(const DeceptionPatternRecord& record);
void CheckTargetShape(const TargetProgram& target);

struct ValidationReport {
  std::string record_id;
  bool valid = false;
  std::vector<std::string> diagnostics;
  std::optional<ExecResult> familiar_run;
  std::optional<ExecResult> deceptive_run;
};

// Executes both variants twice and checks the stored values, their
// difference and determinism. Execution failures mark the record invalid;
// a missing toolchain propagates as EnvironmentError.
ValidationReport ValidateRecord(const DeceptionPatternRecord& record,
                                const ExecOracle& oracle,
                                const ExecLimits& limits = {});

// Same for a target: exec(x) must equal expected_output and be stable.
ValidationReport ValidateTarget(const TargetProgram& target,
                                const ExecOracle& oracle,
                                const ExecLimits& limits = {});

struct CorpusProblem {
  std::filesystem::path file;
  std::string id;  // empty when the id itself could not be read
  std::string message;
};

struct Corpus {
  std::vector<DeceptionPatternRecord> patterns;
  std::vector<TargetProgram> targets;
  // Records that failed to load or validate. They are not served.
  std::vector<CorpusProblem> problems;

  bool ok() const { return problems.empty(); }
  // nullptr when absent.
  const DeceptionPatternRecord* FindPattern(std::string_view id) const;
  const TargetProgram* FindTarget(std::string_view id) const;
  // Throws UsageError naming the id when absent.
  const DeceptionPatternRecord& Pattern(std::string_view id) const;
  const TargetProgram& Target(std::string_view id) const;
};

struct LoadOptions {
  // When set, every record and target is re-executed and only verified
  // entries are served.
  const ExecOracle* oracle = nullptr;
  ExecLimits limits;
};

// Reads `<root>/manifest.json` and the record files it lists. A directory
// without a manifest and without record subdirectories is an empty corpus.
// Throws UsageError when `root` does not exist or the manifest is unreadable.
Corpus LoadCorpus(const std::filesystem::path& root, const LoadOptions& options = {});

// Loads several roots into one corpus; ids must stay unique across roots.
Corpus LoadCorpora(const std::vector<std::filesystem::path>& roots,
                   const LoadOptions& options = {});

// One record or target JSON file, sources resolved next to it. Throws
// UsageError for a missing file and ValidationError for a malformed one.
DeceptionPatternRecord LoadRecordFile(const std::filesystem::path& file);
TargetProgram LoadTargetFile(const std::filesystem::path& file);

// Writes the record JSON plus its adjacent source files, and adds the id
// to the manifest (created if needed). Single writer only.
void SaveRecord(const std::filesystem::path& root, const DeceptionPatternRecord& record);
void SaveTarget(const std::filesystem::path& root, const TargetProgram& target);
void SaveCorpus(const std::filesystem::path& root, const Corpus& corpus);

}  // namespace fpa

#endif  // FPA_CORPUS_H_
