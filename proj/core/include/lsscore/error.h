// Copyright 2026 The lsscore Authors.
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

#ifndef LSSCORE_ERROR_H_
#define LSSCORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace lsscore {

// Bad input data: malformed files, texts that violate an operation's
// preconditions, missing ids.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (encoder shapes, training hyperparameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was invoked in the wrong order, e.g. backward before forward.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, size_t batch_id)
      : std::runtime_error(what), batch_id_(batch_id) {}
  size_t batch_id() const { return batch_id_; }

 private:
  size_t batch_id_;
};

}  // namespace lsscore

#endif  // LSSCORE_ERROR_H_
