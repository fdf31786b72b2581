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

#ifndef GROUNDIT_TOKEN_FUSION_H_
#define GROUNDIT_TOKEN_FUSION_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "groundit/grounding_gate.h"
#include "groundit/numerics.h"

namespace groundit {

// tau_t = (t - 1) / (T - 1) for t = 1..T; a single frame maps to 0.
std::vector<double> NormalizeTimestamps(int frames);

// [sin(tau / w_k), cos(tau / w_k)] pairs with w_k = 10000^(2k / dim).
std::vector<double> SinusoidalEncoding(double tau, int dim);

// Learned alternative: W2 tanh(W1 [tau, tau^2] + b1) + b2.
struct TimeMlpParams {
  DenseMatrix w1;  // hidden x 2
  std::vector<double> b1;
  DenseMatrix w2;  // dim x hidden
  std::vector<double> b2;
};

std::vector<double> MlpEncoding(double tau, const TimeMlpParams& params);

enum class TimeEncoding { kSinusoidal, kMlp };

// Sentence-level text embedding.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual int dim() const = 0;
  virtual std::vector<double> Encode(std::string_view text) const = 0;
};

// Stand-in for a frozen CLS-pooled encoder: the mean over whitespace tokens
// of a Gaussian vector seeded by hash(token) ^ seed. Empty text encodes to
// zeros.
class HashedBagTextEncoder final : public TextEncoder {
 public:
  HashedBagTextEncoder(int dim, std::uint64_t seed);

  int dim() const override { return dim_; }
  std::vector<double> Encode(std::string_view text) const override;
  std::vector<std::vector<double>> EncodeTokens(std::string_view text) const;

 private:
  std::vector<double> TokenVector(std::string_view token) const;

  int dim_;
  std::uint64_t seed_;
};

struct FusionParams {
  DenseMatrix w_proj;  // d_llm x (d_v + d_t + d_f)
  std::vector<double> b_proj;
  double eps = 1e-5;
};

// u~_t = W_proj LN([z_t; e_text; e_time]) + b_proj
std::vector<double> Fuse(std::span<const double> frame_embedding,
                         std::span<const double> text_embedding,
                         std::span<const double> time_embedding, const FusionParams& params);

struct DiscreteTimeToken {
  int bin = 0;
  int num_bins = 1;
  bool operator==(const DiscreteTimeToken&) const = default;
};

inline constexpr int kDefaultTimeBins = 128;

// Nearest bin of tau_t on a num_bins grid over [0, 1].
DiscreteTimeToken QuantizeTime(int frame, int frames, int num_bins);
// Normalized timestamp at the bin's grid point.
double DecodeTimeToken(const DiscreteTimeToken& token);
// Frame (1-based) whose timestamp is closest to the bin's grid point.
int DecodeTimeTokenFrame(const DiscreteTimeToken& token, int frames);

enum class TokenKind { kText, kObj, kTime, kVideo };
std::string_view TokenKindName(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::kVideo;
  std::vector<double> vector;
  // Frame (VIDEO), object slot (OBJ), time bin (TIME) or word index (TEXT).
  std::optional<int> source;
};

struct TokenBudgets {
  int n_obj = 4;
  int n_time = 8;
};

struct MixedTokenSequence {
  std::vector<Token> tokens;
  TokenBudgets budgets;

  // Sequence positions of VIDEO tokens in frame order.
  std::vector<int> VideoPositions() const;
  std::size_t size() const { return tokens.size(); }
};

struct AssemblyParams {
  TokenBudgets budgets;
  int num_bins = kDefaultTimeBins;
  DenseMatrix time_projection;  // d_llm x d_f
};

// First frame of each of `n_time` near-equal contiguous frame groups.
std::vector<int> TimeAnchors(int frames, int n_time);

// Layout: [TEXT...][OBJ x n_obj][TIME, VIDEO...]*n_time. Object embeddings are
// truncated or zero-padded to n_obj. Each TIME token carries the projected
// sinusoidal encoding of its anchor frame and the anchor's discrete bin as
// source. With n_time = 0 the VIDEO tokens follow the OBJ block directly.
// Throws std::invalid_argument when n_time exceeds the frame count or vector
// widths disagree.
MixedTokenSequence AssembleSequence(const std::vector<std::vector<double>>& text_tokens,
                                    const std::vector<std::vector<double>>& obj_embeddings,
                                    const std::vector<std::vector<double>>& fused_video,
                                    const AssemblyParams& params);

// Mean of z_t over the frames where the track's mask is non-empty, projected
// by `projection` (d_llm x d_v). Zeros when no frame qualifies.
std::vector<double> ObjectEmbedding(const DenseMatrix& frame_embeddings,
                                    const MaskTrack& track, const DenseMatrix& projection);

// Diagnostic JSONL: {"kind", "index", "vector_l2", "first4"} per token.
void WriteTokenDump(std::ostream& out, const MixedTokenSequence& seq);

}  // namespace groundit

#endif  // GROUNDIT_TOKEN_FUSION_H_
