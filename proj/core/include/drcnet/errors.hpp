// Copyright 2026 The drcnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace drcnet {

// Base of every error raised by the library. The CLI maps these to exit
// code 2 (data/model error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DRCNET_DEFINE_ERROR(Name)                   \
  class Name : public Error {                       \
   public:                                          \
    explicit Name(const std::string& what)          \
        : Error(std::string(#Name ": ") + what) {}  \
  }

// geometry
DRCNET_DEFINE_ERROR(InvalidLayout);
DRCNET_DEFINE_ERROR(InvalidRuleSet);

// dataset
DRCNET_DEFINE_ERROR(GenerationFailed);
DRCNET_DEFINE_ERROR(NoCandidate);
DRCNET_DEFINE_ERROR(ExtentTooSmall);
DRCNET_DEFINE_ERROR(InsufficientCleanClips);
DRCNET_DEFINE_ERROR(DataError);

// neural engine
DRCNET_DEFINE_ERROR(ShapeMismatch);
DRCNET_DEFINE_ERROR(StateError);
DRCNET_DEFINE_ERROR(SpecError);
DRCNET_DEFINE_ERROR(LabelSpaceMismatch);
DRCNET_DEFINE_ERROR(NumericalError);
DRCNET_DEFINE_ERROR(VersionMismatch);
DRCNET_DEFINE_ERROR(ChecksumError);

// inference
DRCNET_DEFINE_ERROR(ModelShapeMismatch);

// metrics
DRCNET_DEFINE_ERROR(LengthMismatch);
DRCNET_DEFINE_ERROR(UnknownLabel);
DRCNET_DEFINE_ERROR(MissingCleanClass);

#undef DRCNET_DEFINE_ERROR

// Malformed text input. Carries the 1-based line number where parsing failed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("ParseError: line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace drcnet
