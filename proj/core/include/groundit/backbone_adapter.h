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

#ifndef GROUNDIT_BACKBONE_ADAPTER_H_
#define GROUNDIT_BACKBONE_ADAPTER_H_

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "groundit/numerics.h"
#include "groundit/token_fusion.h"

namespace groundit {

// Low-rank update W = W0 + (alpha / r) A B with A: d_out x r, B: r x d_in.
struct LoraAdapter {
  DenseMatrix a;
  DenseMatrix b;
  double alpha = 128.0;

  static LoraAdapter Zero(std::size_t d_out, std::size_t d_in, std::size_t rank, double alpha);

  std::size_t rank() const { return a.cols(); }
  std::size_t d_out() const { return a.rows(); }
  std::size_t d_in() const { return b.cols(); }
  double scale() const { return alpha / static_cast<double>(rank()); }
  // r (d_in + d_out)
  std::size_t ParameterCount() const { return a.size() + b.size(); }

  // Throws std::invalid_argument unless the factors fit a d_out x d_in weight
  // and 1 <= r <= min(d_out, d_in).
  void Validate(std::size_t d_out, std::size_t d_in) const;
};

inline constexpr std::size_t kDefaultLoraRank = 64;
inline constexpr double kDefaultLoraAlpha = 128.0;

// W0 x + (alpha / r) A (B x), without forming A B.
std::vector<double> ApplyLora(const DenseMatrix& w0, const LoraAdapter& adapter,
                              std::span<const double> x);
DenseMatrix MergeLora(const DenseMatrix& w0, const LoraAdapter& adapter);

// Frozen stand-in for the language model. Per token
//   a_t = x_t + W2 tanh(W1 x_t + b1) + b2
// followed by one causal mixing step
//   h_t = a_t + mean_{u < t} x_u   (no mixing term for the first token),
// so h_t depends only on tokens at positions <= t.
struct BackboneStub {
  DenseMatrix w1;
  std::vector<double> b1;
  DenseMatrix w2;
  std::vector<double> b2;

  static BackboneStub Seeded(std::size_t dim, std::uint64_t seed);
  std::size_t dim() const { return w1.cols(); }
};

enum BackboneLayer : std::size_t { kFirstLayer = 0, kFinalLayer = 1 };

// Optional adapter per affine layer of the stub.
using BackboneAdapters = std::array<std::optional<LoraAdapter>, 2>;

// Rows of `inputs` are token vectors in sequence order.
DenseMatrix ForwardBackbone(const DenseMatrix& inputs, const BackboneStub& stub,
                            const BackboneAdapters& adapters = {});
DenseMatrix ForwardBackbone(const MixedTokenSequence& seq, const BackboneStub& stub,
                            const BackboneAdapters& adapters = {});

DenseMatrix SequenceMatrix(const MixedTokenSequence& seq);

// Adapter checkpoint, one record per adapted layer:
//   uint64 layer, uint64 d_out, uint64 d_in, uint64 r, float64 alpha,
//   then A (d_out x r) and B (r x d_in) as row-major float64, little-endian.
void WriteAdapterCheckpoint(std::ostream& out, const BackboneAdapters& adapters);
BackboneAdapters ReadAdapterCheckpoint(std::istream& in);

}  // namespace groundit

#endif  // GROUNDIT_BACKBONE_ADAPTER_H_
