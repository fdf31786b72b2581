// Copyright 2026 The Groundit Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef GROUNDIT_ERRORS_H_
#define GROUNDIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace groundit {

// Precondition violations on caller-supplied values throw
// std::invalid_argument. The types below cover the remaining failure modes.

// A run-length mask whose runs do not describe a valid width x height grid.
class CorruptMaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pluggable component (denoiser, encoder, propagator) returned output that
// breaks its declared shape contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A loss or objective evaluated to NaN or infinity.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input file. `line` is 1-based, 0 when not line-oriented.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace groundit

#endif  // GROUNDIT_ERRORS_H_
