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

#include "fpa/corpus.h"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "fpa/errors.h"
#include "fpa/text_util.h"

namespace fpa {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kManifest = "manifest.json";

bool ValidId(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == '.';
  }) && id.front() != '.';
}

void CheckFields(const json& obj, const std::vector<std::string>& required,
                 const std::vector<std::string>& optional, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& key : required) {
    if (!obj.contains(key)) {
      throw ValidationError(where + ": missing field '" + key + "'");
    }
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(required.begin(), required.end(), key) == required.end() &&
        std::find(optional.begin(), optional.end(), key) == optional.end()) {
      throw ValidationError(where + ": unknown field '" + key + "'");
    }
  }
}

std::string GetString(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw ValidationError(where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::optional<std::string> GetOptionalString(const json& obj, const std::string& key,
                                             const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return GetString(obj, key, where);
}

// Reads a code unit whose `source` names a file relative to `dir`.
CodeUnit UnitFromJson(const json& obj, const fs::path& dir, const std::string& where) {
  CheckFields(obj, {"language", "source", "invocation"}, {"entry_hint"}, where);
  CodeUnit unit;
  try {
    unit.language = ParseLanguage(GetString(obj, "language", where));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": field 'language': " + e.what());
  }
  std::string rel = GetString(obj, "source", where);
  fs::path rel_path(rel);
  if (rel.empty() || rel_path.is_absolute() ||
      std::any_of(rel_path.begin(), rel_path.end(),
                  [](const fs::path& p) { return p == ".."; })) {
    throw ValidationError(where + ": field 'source' must be a relative path inside the corpus");
  }
  fs::path file = dir / rel_path;
  if (!fs::is_regular_file(file)) {
    throw ValidationError(where + ": field 'source': file not found: " + file.string());
  }
  unit.source = ReadFile(file);
  unit.invocation = GetString(obj, "invocation", where);
  unit.entry_hint = GetOptionalString(obj, "entry_hint", where);
  return unit;
}

json UnitToJson(const CodeUnit& unit, const std::string& file_name) {
  json obj;
  obj["language"] = std::string(LanguageName(unit.language));
  obj["source"] = file_name;
  obj["invocation"] = unit.invocation;
  obj["entry_hint"] = unit.entry_hint ? json(*unit.entry_hint) : json(nullptr);
  return obj;
}

// Written verbatim so that save then load is an identity.
const std::string& SourceText(const CodeUnit& unit) { return unit.source; }

DeceptionPatternRecord RecordFromJson(const json& obj, const fs::path& dir,
                                      const std::string& where) {
  CheckFields(obj,
              {"id", "familiar", "deceptive", "delta_description", "familiar_value",
               "actual_value", "origin"},
              {"source_model"}, where);
  DeceptionPatternRecord r;
  r.id = GetString(obj, "id", where);
  r.familiar = UnitFromJson(obj.at("familiar"), dir, where + ": familiar");
  r.deceptive = UnitFromJson(obj.at("deceptive"), dir, where + ": deceptive");
  r.delta_description = GetString(obj, "delta_description", where);
  r.familiar_value = GetString(obj, "familiar_value", where);
  r.actual_value = GetString(obj, "actual_value", where);
  try {
    r.origin = ParseOrigin(GetString(obj, "origin", where));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": field 'origin': " + e.what());
  }
  r.source_model = GetOptionalString(obj, "source_model", where);
  return r;
}

TargetProgram TargetFromJson(const json& obj, const fs::path& dir, const std::string& where) {
  CheckFields(obj, {"id", "unit", "expected_output", "domain_tag"}, {}, where);
  TargetProgram t;
  t.id = GetString(obj, "id", where);
  t.unit = UnitFromJson(obj.at("unit"), dir, where + ": unit");
  t.expected_output = GetString(obj, "expected_output", where);
  t.domain_tag = GetString(obj, "domain_tag", where);
  return t;
}

json ReadJson(const fs::path& file) {
  std::string text = ReadFile(file);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(file.string() + ": invalid JSON: " + e.what());
  }
}

struct Manifest {
  std::vector<std::string> patterns;
  std::vector<std::string> targets;
};

Manifest ReadManifest(const fs::path& root) {
  Manifest m;
  fs::path file = root / kManifest;
  if (!fs::exists(file)) return m;
  json obj = ReadJson(file);
  CheckFields(obj, {}, {"patterns", "targets"}, file.string());
  auto read_list = [&](const char* key, std::vector<std::string>& out) {
    if (!obj.contains(key)) return;
    if (!obj[key].is_array()) {
      throw ValidationError(file.string() + ": field '" + key + "' must be a list");
    }
    for (const auto& v : obj[key]) {
      if (!v.is_string()) {
        throw ValidationError(file.string() + ": field '" + key + "' must list strings");
      }
      out.push_back(v.get<std::string>());
    }
  };
  read_list("patterns", m.patterns);
  read_list("targets", m.targets);
  return m;
}

void WriteManifest(const fs::path& root, const Manifest& m) {
  json obj;
  obj["patterns"] = m.patterns;
  obj["targets"] = m.targets;
  WriteFile(root / kManifest, obj.dump(2) + "\n");
}

void AddToManifest(const fs::path& root, bool pattern, const std::string& id) {
  Manifest m = ReadManifest(root);
  auto& list = pattern ? m.patterns : m.targets;
  if (std::find(list.begin(), list.end(), id) == list.end()) list.push_back(id);
  WriteManifest(root, m);
}

// Runs `unit` twice; fills diagnostics on failure. Returns the first run.
std::optional<ExecResult> RunTwice(const CodeUnit& unit, const ExecOracle& oracle,
                                   const ExecLimits& limits, const std::string& label,
                                   std::vector<std::string>& diagnostics) {
  ExecResult first = oracle.Execute(unit, limits);
  if (!first.ok()) {
    diagnostics.push_back(label + " failed to execute: " + first.Describe());
    return first;
  }
  ExecResult second = oracle.Execute(unit, limits);
  if (!second.ok()) {
    diagnostics.push_back(label + " failed on the second run: " + second.Describe());
  } else if (!Equivalent(first, second)) {
    diagnostics.push_back(label + " is not deterministic: two runs disagree");
  }
  return first;
}

}  // namespace

std::string_view OriginName(Origin origin) {
  return origin == Origin::kSeed ? "seed" : "mined";
}

Origin ParseOrigin(std::string_view name) {
  if (name == "seed") return Origin::kSeed;
  if (name == "mined") return Origin::kMined;
  throw ValidationError("unknown origin '" + std::string(name) + "'");
}

void CheckRecordShape(const DeceptionPatternRecord& record) {
  if (!ValidId(record.id)) {
    throw ValidationError("field 'id': invalid id '" + record.id + "'");
  }
  try {
    CheckCodeUnit(record.familiar);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("field 'familiar': ") + e.what());
  }
  try {
    CheckCodeUnit(record.deceptive);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("field 'deceptive': ") + e.what());
  }
  if (record.familiar.language != record.deceptive.language) {
    throw ValidationError("field 'deceptive': language differs from the familiar variant");
  }
  if (record.familiar.invocation != record.deceptive.invocation) {
    throw ValidationError("field 'deceptive': invocation differs from the familiar variant");
  }
  if (Trim(record.delta_description).empty()) {
    throw ValidationError("field 'delta_description' is empty");
  }
  if (record.familiar_value == record.actual_value) {
    throw ValidationError(
        "deception invariant violated: familiar_value equals actual_value ('" +
        record.familiar_value + "'), so the perturbation has no runtime effect");
  }
}

void CheckTargetShape(const TargetProgram& target) {
  if (!ValidId(target.id)) {
    throw ValidationError("field 'id': invalid id '" + target.id + "'");
  }
  try {
    CheckCodeUnit(target.unit);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("field 'unit': ") + e.what());
  }
  if (!IsExecutable(target.unit.language)) {
    throw ValidationError("field 'unit': target programs must be executable");
  }
}

ValidationReport ValidateRecord(const DeceptionPatternRecord& record,
                                const ExecOracle& oracle, const ExecLimits& limits) {
  ValidationReport report;
  report.record_id = record.id;
  try {
    CheckRecordShape(record);
  } catch (const ValidationError& e) {
    report.diagnostics.push_back(e.what());
    return report;
  }
  report.familiar_run =
      RunTwice(record.familiar, oracle, limits, "familiar", report.diagnostics);
  report.deceptive_run =
      RunTwice(record.deceptive, oracle, limits, "deceptive", report.diagnostics);
  if (report.familiar_run->ok() &&
      report.familiar_run->stdout_normalized != record.familiar_value) {
    report.diagnostics.push_back("familiar executes to '" +
                                 report.familiar_run->stdout_normalized +
                                 "', record says '" + record.familiar_value + "'");
  }
  if (report.deceptive_run->ok() &&
      report.deceptive_run->stdout_normalized != record.actual_value) {
    report.diagnostics.push_back("deceptive executes to '" +
                                 report.deceptive_run->stdout_normalized +
                                 "', record says '" + record.actual_value + "'");
  }
  if (report.familiar_run->ok() && report.deceptive_run->ok() &&
      Equivalent(*report.familiar_run, *report.deceptive_run)) {
    report.diagnostics.push_back(
        "deception invariant violated: both variants behave identically at runtime");
  }
  report.valid = report.diagnostics.empty();
  return report;
}

ValidationReport ValidateTarget(const TargetProgram& target, const ExecOracle& oracle,
                                const ExecLimits& limits) {
  ValidationReport report;
  report.record_id = target.id;
  try {
    CheckTargetShape(target);
  } catch (const ValidationError& e) {
    report.diagnostics.push_back(e.what());
    return report;
  }
  report.familiar_run = RunTwice(target.unit, oracle, limits, "target", report.diagnostics);
  if (report.familiar_run->ok() &&
      report.familiar_run->stdout_normalized != target.expected_output) {
    report.diagnostics.push_back("target executes to '" +
                                 report.familiar_run->stdout_normalized +
                                 "', expected_output says '" + target.expected_output + "'");
  }
  report.valid = report.diagnostics.empty();
  return report;
}

const DeceptionPatternRecord* Corpus::FindPattern(std::string_view id) const {
  for (const auto& p : patterns) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const TargetProgram* Corpus::FindTarget(std::string_view id) const {
  for (const auto& t : targets) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const DeceptionPatternRecord& Corpus::Pattern(std::string_view id) const {
  if (const auto* p = FindPattern(id)) return *p;
  throw UsageError("unknown pattern id '" + std::string(id) + "'");
}

const TargetProgram& Corpus::Target(std::string_view id) const {
  if (const auto* t = FindTarget(id)) return *t;
  throw UsageError("unknown target id '" + std::string(id) + "'");
}

Corpus LoadCorpus(const fs::path& root, const LoadOptions& options) {
  if (!fs::is_directory(root)) {
    throw UsageError("corpus directory not found: " + root.string());
  }
  Corpus corpus;
  Manifest manifest;
  if (!fs::exists(root / kManifest)) {
    if (fs::exists(root / "patterns") || fs::exists(root / "targets")) {
      corpus.problems.push_back({root / kManifest, "", "manifest.json is missing"});
    }
    return corpus;
  }
  try {
    manifest = ReadManifest(root);
  } catch (const ValidationError& e) {
    corpus.problems.push_back({root / kManifest, "", e.what()});
    return corpus;
  }

  std::set<std::string> seen;
  for (const auto& id : manifest.patterns) {
    fs::path dir = root / "patterns";
    fs::path file = dir / (id + ".json");
    if (!seen.insert("p:" + id).second) {
      corpus.problems.push_back({file, id, "duplicate id '" + id + "'"});
      continue;
    }
    try {
      if (!ValidId(id)) throw ValidationError("invalid id '" + id + "' in manifest");
      if (!fs::exists(file)) throw ValidationError("record file not found");
      DeceptionPatternRecord r = RecordFromJson(ReadJson(file), dir, file.string());
      if (r.id != id) {
        throw ValidationError("field 'id': '" + r.id + "' does not match manifest id '" +
                              id + "'");
      }
      CheckRecordShape(r);
      if (options.oracle) {
        ValidationReport rep = ValidateRecord(r, *options.oracle, options.limits);
        if (!rep.valid) throw ValidationError(Join(rep.diagnostics, "; "));
      }
      corpus.patterns.push_back(std::move(r));
    } catch (const ValidationError& e) {
      corpus.problems.push_back({file, id, e.what()});
    }
  }
  for (const auto& id : manifest.targets) {
    fs::path dir = root / "targets";
    fs::path file = dir / (id + ".json");
    if (!seen.insert("t:" + id).second) {
      corpus.problems.push_back({file, id, "duplicate id '" + id + "'"});
      continue;
    }
    try {
      if (!ValidId(id)) throw ValidationError("invalid id '" + id + "' in manifest");
      if (!fs::exists(file)) throw ValidationError("target file not found");
      TargetProgram t = TargetFromJson(ReadJson(file), dir, file.string());
      if (t.id != id) {
        throw ValidationError("field 'id': '" + t.id + "' does not match manifest id '" +
                              id + "'");
      }
      CheckTargetShape(t);
      if (options.oracle) {
        ValidationReport rep = ValidateTarget(t, *options.oracle, options.limits);
        if (!rep.valid) throw ValidationError(Join(rep.diagnostics, "; "));
      }
      corpus.targets.push_back(std::move(t));
    } catch (const ValidationError& e) {
      corpus.problems.push_back({file, id, e.what()});
    }
  }
  return corpus;
}

Corpus LoadCorpora(const std::vector<fs::path>& roots, const LoadOptions& options) {
  Corpus merged;
  std::set<std::string> pattern_ids, target_ids;
  for (const auto& root : roots) {
    Corpus c = LoadCorpus(root, options);
    for (auto& p : c.problems) merged.problems.push_back(std::move(p));
    for (auto& p : c.patterns) {
      if (!pattern_ids.insert(p.id).second) {
        merged.problems.push_back({root, p.id, "duplicate id '" + p.id + "'"});
        continue;
      }
      merged.patterns.push_back(std::move(p));
    }
    for (auto& t : c.targets) {
      if (!target_ids.insert(t.id).second) {
        merged.problems.push_back({root, t.id, "duplicate id '" + t.id + "'"});
        continue;
      }
      merged.targets.push_back(std::move(t));
    }
  }
  return merged;
}

DeceptionPatternRecord LoadRecordFile(const fs::path& file) {
  if (!fs::is_regular_file(file)) throw UsageError("no such file: " + file.string());
  DeceptionPatternRecord r = RecordFromJson(ReadJson(file), file.parent_path(), file.string());
  CheckRecordShape(r);
  return r;
}

TargetProgram LoadTargetFile(const fs::path& file) {
  if (!fs::is_regular_file(file)) throw UsageError("no such file: " + file.string());
  TargetProgram t = TargetFromJson(ReadJson(file), file.parent_path(), file.string());
  CheckTargetShape(t);
  return t;
}

void SaveRecord(const fs::path& root, const DeceptionPatternRecord& record) {
  CheckRecordShape(record);
  fs::path dir = root / "patterns";
  std::string ext(SourceExtension(record.language()));
  std::string familiar_file = record.id + ".familiar." + ext;
  std::string deceptive_file = record.id + ".deceptive." + ext;
  WriteFile(dir / familiar_file, SourceText(record.familiar));
  WriteFile(dir / deceptive_file, SourceText(record.deceptive));
  json obj;
  obj["id"] = record.id;
  obj["familiar"] = UnitToJson(record.familiar, familiar_file);
  obj["deceptive"] = UnitToJson(record.deceptive, deceptive_file);
  obj["delta_description"] = record.delta_description;
  obj["familiar_value"] = record.familiar_value;
  obj["actual_value"] = record.actual_value;
  obj["origin"] = std::string(OriginName(record.origin));
  obj["source_model"] = record.source_model ? json(*record.source_model) : json(nullptr);
  WriteFile(dir / (record.id + ".json"), obj.dump(2) + "\n");
  AddToManifest(root, true, record.id);
}

void SaveTarget(const fs::path& root, const TargetProgram& target) {
  CheckTargetShape(target);
  fs::path dir = root / "targets";
  std::string file = target.id + "." + std::string(SourceExtension(target.unit.language));
  WriteFile(dir / file, SourceText(target.unit));
  json obj;
  obj["id"] = target.id;
  obj["unit"] = UnitToJson(target.unit, file);
  obj["expected_output"] = target.expected_output;
  obj["domain_tag"] = target.domain_tag;
  WriteFile(dir / (target.id + ".json"), obj.dump(2) + "\n");
  AddToManifest(root, false, target.id);
}

void SaveCorpus(const fs::path& root, const Corpus& corpus) {
  fs::create_directories(root);
  if (!fs::exists(root / kManifest)) WriteManifest(root, {});
  for (const auto& p : corpus.patterns) SaveRecord(root, p);
  for (const auto& t : corpus.targets) SaveTarget(root, t);
}

}  // namespace fpa
