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

#ifndef FPA_TESTS_TEST_PATHS_H_
#define FPA_TESTS_TEST_PATHS_H_

#include <filesystem>

namespace fpa::testing {

inline std::filesystem::path SourceRoot() { return FPA_SOURCE_DIR; }
inline std::filesystem::path CorpusDir(const char* name) {
  return SourceRoot() / "corpus" / name;
}

// Fresh empty directory under the build tree.
inline std::filesystem::path ScratchDir(const std::string& name) {
  std::filesystem::path dir = std::filesystem::path(FPA_BINARY_DIR) / "test-scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fpa::testing

#endif  // FPA_TESTS_TEST_PATHS_H_
