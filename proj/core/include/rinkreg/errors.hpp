/* Copyright 2026 The rinkreg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef RINKREG_ERRORS_HPP_
#define RINKREG_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rinkreg {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Randomization ranges admit geometry that violates RinkSpec invariants.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient or singular projective input.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A point maps to (or from) the line at infinity.
class HorizonError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input document (JSON, PNG, manifest line).
class ParseError : public Error {
 public:
  using Error::Error;
};

class MissingPrediction : public Error {
 public:
  explicit MissingPrediction(std::vector<std::string> ids)
      : Error(Format(ids)), ids_(std::move(ids)) {}

  const std::vector<std::string>& ids() const { return ids_; }

 private:
  static std::string Format(const std::vector<std::string>& ids) {
    std::string msg = "missing predictions for " + std::to_string(ids.size()) + " sample(s):";
    for (const auto& id : ids) msg += " " + id;
    return msg;
  }

  std::vector<std::string> ids_;
};

}  // namespace rinkreg

#endif  // RINKREG_ERRORS_HPP_
