// Copyright 2026 The provshift Authors.
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

#ifndef PROVSHIFT_ERRORS_H_
#define PROVSHIFT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace provshift {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Data violates a documented invariant (duplicate id, label outside {0,1}).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Derived test rates fall outside [0,1].
class InfeasibleDistribution : public Error {
 public:
  using Error::Error;
};

// A pool cell holds fewer documents than the split requires.
class InfeasiblePool : public Error {
 public:
  using Error::Error;
};

class MissingEmbedding : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Prediction routine does not match the mode the model was trained in.
class ModeError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// AUPRC requested for a label set without positives.
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

}  // namespace provshift

#endif  // PROVSHIFT_ERRORS_H_
