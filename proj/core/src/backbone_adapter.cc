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

#include "groundit/backbone_adapter.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "groundit/errors.h"
#include "groundit/random.h"

namespace groundit {

LoraAdapter LoraAdapter::Zero(std::size_t d_out, std::size_t d_in, std::size_t rank,
                              double alpha) {
  return {DenseMatrix(d_out, rank), DenseMatrix(rank, d_in), alpha};
}

void LoraAdapter::Validate(std::size_t out_dim, std::size_t in_dim) const {
  const std::size_t r = rank();
  if (r < 1 || r > std::min(out_dim, in_dim)) {
    throw std::invalid_argument("LoRA rank " + std::to_string(r) + " outside [1, " +
                                std::to_string(std::min(out_dim, in_dim)) + "]");
  }
  if (a.rows() != out_dim || b.rows() != r || b.cols() != in_dim) {
    throw std::invalid_argument("LoRA factors do not match a " + std::to_string(out_dim) +
                                "x" + std::to_string(in_dim) + " weight");
  }
  if (!std::isfinite(alpha)) throw std::invalid_argument("LoRA alpha must be finite");
}

std::vector<double> ApplyLora(const DenseMatrix& w0, const LoraAdapter& adapter,
                              std::span<const double> x) {
  adapter.Validate(w0.rows(), w0.cols());
  auto y = Matvec(w0, x);
  const auto bx = Matvec(adapter.b, x);
  const auto abx = Matvec(adapter.a, bx);
  const double scale = adapter.scale();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * abx[i];
  return y;
}

DenseMatrix MergeLora(const DenseMatrix& w0, const LoraAdapter& adapter) {
  adapter.Validate(w0.rows(), w0.cols());
  DenseMatrix merged = w0;
  const double scale = adapter.scale();
  for (std::size_t i = 0; i < w0.rows(); ++i) {
    for (std::size_t k = 0; k < adapter.rank(); ++k) {
      const double aik = scale * adapter.a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < w0.cols(); ++j) merged(i, j) += aik * adapter.b(k, j);
    }
  }
  return merged;
}

BackboneStub BackboneStub::Seeded(std::size_t dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("BackboneStub: dim must be >= 1");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  BackboneStub stub;
  stub.w1 = GaussianMatrix(dim, dim, scale, rng);
  stub.b1 = GaussianVector(dim, 0.1, rng);
  stub.w2 = GaussianMatrix(dim, dim, scale, rng);
  stub.b2 = GaussianVector(dim, 0.1, rng);
  return stub;
}

namespace {

std::vector<double> Layer(const DenseMatrix& w, const std::optional<LoraAdapter>& adapter,
                          std::span<const double> x) {
  return adapter ? ApplyLora(w, *adapter, x) : Matvec(w, x);
}

}  // namespace

DenseMatrix ForwardBackbone(const DenseMatrix& inputs, const BackboneStub& stub,
                            const BackboneAdapters& adapters) {
  const std::size_t d = stub.dim();
  if (inputs.cols() != d || stub.w1.rows() != d || stub.w2.rows() != d ||
      stub.w2.cols() != d || stub.b1.size() != d || stub.b2.size() != d) {
    throw std::invalid_argument("ForwardBackbone: token width " +
                                std::to_string(inputs.cols()) + " does not match stub width " +
                                std::to_string(d));
  }
  DenseMatrix hidden(inputs.rows(), d);
  std::vector<double> prefix_sum(d, 0.0);
  for (std::size_t t = 0; t < inputs.rows(); ++t) {
    const auto x = inputs.row(t);
    auto pre = Layer(stub.w1, adapters[kFirstLayer], x);
    for (std::size_t i = 0; i < d; ++i) pre[i] = std::tanh(pre[i] + stub.b1[i]);
    const auto post = Layer(stub.w2, adapters[kFinalLayer], pre);
    auto h = hidden.row(t);
    for (std::size_t i = 0; i < d; ++i) {
      h[i] = x[i] + post[i] + stub.b2[i];
      if (t > 0) h[i] += prefix_sum[i] / static_cast<double>(t);
    }
    for (std::size_t i = 0; i < d; ++i) prefix_sum[i] += x[i];
  }
  return hidden;
}

DenseMatrix SequenceMatrix(const MixedTokenSequence& seq) {
  const std::size_t d = seq.tokens.empty() ? 0 : seq.tokens.front().vector.size();
  DenseMatrix m(seq.tokens.size(), d);
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const auto& v = seq.tokens[i].vector;
    if (v.size() != d) throw std::invalid_argument("SequenceMatrix: ragged token widths");
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

DenseMatrix ForwardBackbone(const MixedTokenSequence& seq, const BackboneStub& stub,
                            const BackboneAdapters& adapters) {
  return ForwardBackbone(SequenceMatrix(seq), stub, adapters);
}

namespace {

template <typename T>
void WritePod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw SchemaError("adapter checkpoint: truncated record", 0);
  }
  return value;
}

void WriteValues(std::ostream& out, const DenseMatrix& m) {
  const auto v = m.values();
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

DenseMatrix ReadValues(std::istream& in, std::uint64_t rows, std::uint64_t cols) {
  std::vector<double> v(rows * cols);
  if (!in.read(reinterpret_cast<char*>(v.data()),
               static_cast<std::streamsize>(v.size() * sizeof(double)))) {
    throw SchemaError("adapter checkpoint: truncated matrix", 0);
  }
  return DenseMatrix(rows, cols, std::move(v));
}

}  // namespace

void WriteAdapterCheckpoint(std::ostream& out, const BackboneAdapters& adapters) {
  for (std::size_t layer = 0; layer < adapters.size(); ++layer) {
    if (!adapters[layer]) continue;
    const auto& a = *adapters[layer];
    WritePod<std::uint64_t>(out, layer);
    WritePod<std::uint64_t>(out, a.d_out());
    WritePod<std::uint64_t>(out, a.d_in());
    WritePod<std::uint64_t>(out, a.rank());
    WritePod<double>(out, a.alpha);
    WriteValues(out, a.a);
    WriteValues(out, a.b);
  }
}

BackboneAdapters ReadAdapterCheckpoint(std::istream& in) {
  constexpr std::uint64_t kMaxDim = 1u << 16;
  BackboneAdapters adapters;
  while (in.peek() != std::char_traits<char>::eof()) {
    const auto layer = ReadPod<std::uint64_t>(in);
    const auto d_out = ReadPod<std::uint64_t>(in);
    const auto d_in = ReadPod<std::uint64_t>(in);
    const auto rank = ReadPod<std::uint64_t>(in);
    const auto alpha = ReadPod<double>(in);
    if (layer >= adapters.size()) throw SchemaError("adapter checkpoint: bad layer id", 0);
    if (d_out > kMaxDim || d_in > kMaxDim || rank > kMaxDim) {
      throw SchemaError("adapter checkpoint: implausible dimensions", 0);
    }
    LoraAdapter a{ReadValues(in, d_out, rank), ReadValues(in, rank, d_in), alpha};
    try {
      a.Validate(d_out, d_in);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string("adapter checkpoint: ") + e.what(), 0);
    }
    adapters[layer] = std::move(a);
  }
  return adapters;
}

}  // namespace groundit
