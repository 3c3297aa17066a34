// Copyright 2026 The premise-forge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace premise_forge {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition did not hold (empty premise, bad fractions, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// model-client

class TransportError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

class UnboundPlaceholder : public Error {
 public:
  explicit UnboundPlaceholder(std::string name)
      : Error("unbound placeholder: {" + name + "}"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// pipeline

class MalformedExtraction : public Error {
 public:
  using Error::Error;
};

class CaptionMissingPremise : public Error {
 public:
  using Error::Error;
};

class CaptionTooLong : public Error {
 public:
  using Error::Error;
};

class CorruptionIdentical : public Error {
 public:
  using Error::Error;
};

class MalformedQuestion : public Error {
 public:
  using Error::Error;
};

// dataset

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  std::size_t line() const noexcept { return line_; }
  /// The message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)),
        detail_(what) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  /// The message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string field_;
  std::string detail_;
};

class InsufficientAnswered : public Error {
 public:
  using Error::Error;
};

// metrics

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class UnknownSampleId : public Error {
 public:
  explicit UnknownSampleId(const std::string& id)
      : Error("prediction refers to unknown sample_id '" + id + "'") {}
};

class AllResamplesUndefined : public Error {
 public:
  using Error::Error;
};

// grpo

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class SupportMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidGroup : public Error {
 public:
  using Error::Error;
};

// configuration

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace premise_forge
