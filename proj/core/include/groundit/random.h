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

#ifndef GROUNDIT_RANDOM_H_
#define GROUNDIT_RANDOM_H_

#include <cstdint>
#include <random>
#include <vector>

#include "groundit/numerics.h"

namespace groundit {

// All seeded draws in the library go through this engine so a seed fully
// determines every stub weight and noise sample.
using Rng = std::mt19937_64;

inline std::vector<double> GaussianVector(std::size_t n, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline DenseMatrix GaussianMatrix(std::size_t rows, std::size_t cols, double stddev,
                                  Rng& rng) {
  return DenseMatrix(rows, cols, GaussianVector(rows * cols, stddev, rng));
}

}  // namespace groundit

#endif  // GROUNDIT_RANDOM_H_
