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

#ifndef GROUNDIT_NUMERICS_H_
#define GROUNDIT_NUMERICS_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace groundit {

// Row-major dense matrix of doubles. Used for every learned or frozen weight
// in the pipeline (projections, LoRA factors, backbone layers).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  // Throws std::invalid_argument unless values.size() == rows * cols and every
  // entry is finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix Identity(std::size_t n);
  static DenseMatrix FromRows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// A discrete probability distribution: non-negative entries summing to one.
class ProbVector {
 public:
  ProbVector() = default;

  // Validates non-negativity and unit sum (within 1e-9).
  static ProbVector FromProbs(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const ProbVector&) const = default;

 private:
  friend ProbVector Softmax(std::span<const double> logits);
  explicit ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

inline constexpr double kKlFloor = 1e-12;

// Max-subtracted softmax. Throws on empty or non-finite input.
ProbVector Softmax(std::span<const double> logits);

// (v - mean) / sqrt(var + eps) with population variance. Constant input maps
// to all zeros.
std::vector<double> LayerNorm(std::span<const double> v, double eps);

// KL(p || q) = sum p ln(p / q), with q floored at kKlFloor and 0 ln 0 = 0.
double KlDivergence(const ProbVector& p, const ProbVector& q);

using ScalarFunction = std::function<double(std::span<const double>)>;

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. Throws
// NonFiniteError if any evaluation of f is not finite.
std::vector<double> FiniteDiffGrad(const ScalarFunction& f, std::span<const double> x,
                                   double h);

std::vector<double> Matvec(const DenseMatrix& w, std::span<const double> x);
// w^T x
std::vector<double> MatvecTransposed(const DenseMatrix& w, std::span<const double> x);

double Dot(std::span<const double> a, std::span<const double> b);
double L2Norm(std::span<const double> v);
bool AllFinite(std::span<const double> v);

}  // namespace groundit

#endif  // GROUNDIT_NUMERICS_H_
