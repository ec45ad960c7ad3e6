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

#ifndef FPA_ERRORS_H_
#define FPA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fpa {

// Root of every error the toolkit throws. The CLI maps subclasses onto exit
// codes (see ExitCodeFor in tools/).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad flags, unknown ids, missing paths.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Missing toolchain, sandbox facility or other environment problem.
class EnvironmentError : public Error {
 public:
  using Error::Error;
};

// A record, corpus file or composed program violates a contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Two execution results cannot be compared because one is not ok.
class NotComparableError : public Error {
 public:
  using Error::Error;
};

class InjectionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RenameError : public Error {
 public:
  using Error::Error;
};

// Provider-side failures. Each is surfaced distinctly, never swallowed.
class ProviderError : public Error {
 public:
  using Error::Error;
};

class AuthError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class RateLimitError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class MalformedResponseError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class TransientError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// Raised when a remote call is attempted in offline mode.
class OfflineError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// The judge could not produce a conforming answer after one re-ask.
class UnparseableError : public Error {
 public:
  using Error::Error;
};

// A per-candidate LLM call budget ran out.
class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpa

#endif  // FPA_ERRORS_H_
