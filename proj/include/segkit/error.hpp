/* Copyright 2026 The segkit Authors. All Rights Reserved.

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

#ifndef SEGKIT_ERROR_HPP_
#define SEGKIT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace segkit {

// Base of every error thrown by the library. Anything that is not one of the
// subclasses below signals a violated internal invariant.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed RLE counts or compressed-RLE strings.
class CodecError : public Error {
 public:
  using Error::Error;
};

// Operands whose grid shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Content of an input file (or in-memory equivalent) that fails validation.
class InputError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(int epoch, const std::string& what)
      : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace segkit

#endif  // SEGKIT_ERROR_HPP_
