// Copyright 2026 The FuzzForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FF_ERROR_HPP_
#define FF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ff {

// Base for all fuzzforge errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated an API contract (wrong scheme, empty argument, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Index or size outside the permitted range.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Filesystem / process-level failure. Distinct from a negative answer:
// "could not read the binary" is an IoError, never a plain `false`.
class IoError : public Error {
 public:
  using Error::Error;
};

// Bad campaign or tool configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The resident persistent process is gone and cannot be revived; the
// session has to be re-initialized.
class SessionBroken : public Error {
 public:
  using Error::Error;
};

// An output layout is missing one of its required directories.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Refusal to compare campaigns that ran in different execution modes.
class ModeMismatchError : public Error {
 public:
  using Error::Error;
};

// Refusal to train on a corpus that failed validation.
class DataQualityError : public Error {
 public:
  using Error::Error;
};

}  // namespace ff

#endif  // FF_ERROR_HPP_
