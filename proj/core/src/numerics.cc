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

#include "groundit/numerics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "groundit/errors.h"

namespace groundit {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("DenseMatrix: expected " + std::to_string(rows * cols) +
                                " values, got " + std::to_string(values_.size()));
  }
  if (!AllFinite(values_)) {
    throw std::invalid_argument("DenseMatrix: non-finite entry");
  }
}

DenseMatrix DenseMatrix::Identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("DenseMatrix: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(values));
}

ProbVector ProbVector::FromProbs(std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("ProbVector: entries must be finite and >= 0");
    }
    sum += p;
  }
  if (probs.empty() || std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("ProbVector: entries must sum to 1");
  }
  return ProbVector(std::move(probs));
}

ProbVector Softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("Softmax: empty input");
  if (!AllFinite(logits)) throw std::invalid_argument("Softmax: non-finite logit");
  const double max = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return ProbVector(std::move(out));
}

std::vector<double> LayerNorm(std::span<const double> v, double eps) {
  if (v.empty()) throw std::invalid_argument("LayerNorm: empty input");
  if (!(eps > 0.0)) throw std::invalid_argument("LayerNorm: eps must be > 0");
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  const double inv = 1.0 / std::sqrt(var + eps);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) * inv;
  return out;
}

double KlDivergence(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("KlDivergence: length mismatch (" +
                                std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()) + ")");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(p[i]) - std::log(std::max(q[i], kKlFloor)));
  }
  // Rounding can leave a tiny negative residue when p == q.
  return std::max(kl, 0.0);
}

std::vector<double> FiniteDiffGrad(const ScalarFunction& f, std::span<const double> x,
                                   double h) {
  if (!(h > 0.0)) throw std::invalid_argument("FiniteDiffGrad: h must be > 0");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = f(probe);
    probe[i] = saved - h;
    const double down = f(probe);
    probe[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NonFiniteError("FiniteDiffGrad: non-finite evaluation at coordinate " +
                           std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<double> Matvec(const DenseMatrix& w, std::span<const double> x) {
  if (w.cols() != x.size()) {
    throw std::invalid_argument("Matvec: matrix has " + std::to_string(w.cols()) +
                                " columns, vector has " + std::to_string(x.size()));
  }
  std::vector<double> out(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) out[r] = Dot(w.row(r), x);
  return out;
}

std::vector<double> MatvecTransposed(const DenseMatrix& w, std::span<const double> x) {
  if (w.rows() != x.size()) {
    throw std::invalid_argument("MatvecTransposed: matrix has " +
                                std::to_string(w.rows()) + " rows, vector has " +
                                std::to_string(x.size()));
  }
  std::vector<double> out(w.cols(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    for (std::size_t c = 0; c < w.cols(); ++c) out[c] += row[c] * x[r];
  }
  return out;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("Dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double L2Norm(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace groundit
