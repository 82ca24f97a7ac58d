// Copyright 2026 The WKM Planner Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace wkm {

// Base for all errors raised by the runtime. Each subclass maps to one
// failure family so callers (notably the CLI) can translate to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Index, dimension or length outside the accepted range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Text or file content did not match the expected format. Carries the
// offending raw text when there is one.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::string raw = {})
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A remote provider could not be reached or answered with an error.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Configuration file invalid or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A stage was asked to run before the artifacts it consumes exist.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace wkm
