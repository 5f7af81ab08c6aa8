// Copyright 2026 The drm Authors
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

namespace drm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed XML or malformed numeric attribute. line() is 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Valid URDF using a feature outside the supported subset (floating joints,
// planar joints, mimic).
class UnsupportedFeatureError : public Error {
 public:
  using Error::Error;
};

// Structural or physical inconsistency in a robot description.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Dynamics requested on a model built with kinematics_only.
class DynamicsUnavailableError : public Error {
 public:
  DynamicsUnavailableError() : Error("dynamics unavailable: model was built kinematics_only") {}
};

// Non-finite value or failed factorization inside a numerical routine.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class UnknownLinkError : public Error {
 public:
  explicit UnknownLinkError(const std::string& link) : Error("unknown link: " + link) {}
};

}  // namespace drm
