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

#include "groundit/token_fusion.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "groundit/prompt.h"
#include "groundit/random.h"
#include "json.hpp"

namespace groundit {

std::vector<double> NormalizeTimestamps(int frames) {
  if (frames < 1) throw std::invalid_argument("NormalizeTimestamps: frames must be >= 1");
  std::vector<double> tau(frames, 0.0);
  if (frames == 1) return tau;
  const double denom = frames - 1;
  for (int t = 1; t <= frames; ++t) tau[t - 1] = (t - 1) / denom;
  return tau;
}

std::vector<double> SinusoidalEncoding(double tau, int dim) {
  if (dim < 2 || dim % 2 != 0) {
    throw std::invalid_argument("SinusoidalEncoding: dimension must be even and >= 2");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("SinusoidalEncoding: tau must lie in [0, 1]");
  }
  std::vector<double> out(dim);
  for (int k = 0; k < dim / 2; ++k) {
    const double omega = std::pow(10000.0, 2.0 * k / dim);
    out[2 * k] = std::sin(tau / omega);
    out[2 * k + 1] = std::cos(tau / omega);
  }
  return out;
}

std::vector<double> MlpEncoding(double tau, const TimeMlpParams& p) {
  if (p.w1.cols() != 2 || p.b1.size() != p.w1.rows() || p.w2.cols() != p.w1.rows() ||
      p.b2.size() != p.w2.rows()) {
    throw std::invalid_argument("MlpEncoding: inconsistent parameter shapes");
  }
  const double in[2] = {tau, tau * tau};
  auto hidden = Matvec(p.w1, in);
  for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] = std::tanh(hidden[i] + p.b1[i]);
  auto out = Matvec(p.w2, hidden);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += p.b2[i];
  return out;
}

HashedBagTextEncoder::HashedBagTextEncoder(int dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim < 1) throw std::invalid_argument("HashedBagTextEncoder: dim must be >= 1");
}

std::vector<double> HashedBagTextEncoder::TokenVector(std::string_view token) const {
  // FNV-1a, stable across platforms and runs.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ull;
  }
  Rng rng(h ^ seed_);
  return GaussianVector(dim_, 1.0, rng);
}

std::vector<std::vector<double>> HashedBagTextEncoder::EncodeTokens(
    std::string_view text) const {
  std::vector<std::vector<double>> out;
  for (const auto& token : TokenizeQuery(text)) out.push_back(TokenVector(token));
  return out;
}

std::vector<double> HashedBagTextEncoder::Encode(std::string_view text) const {
  const auto tokens = EncodeTokens(text);
  std::vector<double> mean(dim_, 0.0);
  if (tokens.empty()) return mean;
  for (const auto& v : tokens) {
    for (int i = 0; i < dim_; ++i) mean[i] += v[i];
  }
  for (double& v : mean) v /= static_cast<double>(tokens.size());
  return mean;
}

std::vector<double> Fuse(std::span<const double> frame_embedding,
                         std::span<const double> text_embedding,
                         std::span<const double> time_embedding, const FusionParams& params) {
  const std::size_t width = frame_embedding.size() + text_embedding.size() +
                            time_embedding.size();
  if (params.w_proj.cols() != width || params.b_proj.size() != params.w_proj.rows()) {
    throw std::invalid_argument("Fuse: projection expects " +
                                std::to_string(params.w_proj.cols()) +
                                " inputs, concatenation has " + std::to_string(width));
  }
  std::vector<double> concat;
  concat.reserve(width);
  concat.insert(concat.end(), frame_embedding.begin(), frame_embedding.end());
  concat.insert(concat.end(), text_embedding.begin(), text_embedding.end());
  concat.insert(concat.end(), time_embedding.begin(), time_embedding.end());
  auto out = Matvec(params.w_proj, LayerNorm(concat, params.eps));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += params.b_proj[i];
  return out;
}

DiscreteTimeToken QuantizeTime(int frame, int frames, int num_bins) {
  if (frames < 1 || frame < 1 || frame > frames) {
    throw std::invalid_argument("QuantizeTime: frame " + std::to_string(frame) +
                                " outside [1, " + std::to_string(frames) + "]");
  }
  if (num_bins < 1) throw std::invalid_argument("QuantizeTime: num_bins must be >= 1");
  const double tau = NormalizeTimestamps(frames)[frame - 1];
  const int bin = static_cast<int>(std::floor(tau * (num_bins - 1) + 0.5));
  return {std::min(bin, num_bins - 1), num_bins};
}

double DecodeTimeToken(const DiscreteTimeToken& token) {
  if (token.num_bins < 1 || token.bin < 0 || token.bin >= token.num_bins) {
    throw std::invalid_argument("DecodeTimeToken: bin out of range");
  }
  return token.num_bins == 1 ? 0.0 : static_cast<double>(token.bin) / (token.num_bins - 1);
}

int DecodeTimeTokenFrame(const DiscreteTimeToken& token, int frames) {
  if (frames < 1) throw std::invalid_argument("DecodeTimeTokenFrame: frames must be >= 1");
  const double tau = DecodeTimeToken(token);
  return static_cast<int>(std::floor(tau * (frames - 1) + 0.5)) + 1;
}

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kText:
      return "TEXT";
    case TokenKind::kObj:
      return "OBJ";
    case TokenKind::kTime:
      return "TIME";
    case TokenKind::kVideo:
      return "VIDEO";
  }
  return "?";
}

std::vector<int> MixedTokenSequence::VideoPositions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind == TokenKind::kVideo) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> TimeAnchors(int frames, int n_time) {
  if (n_time < 0 || n_time > frames) {
    throw std::invalid_argument("TimeAnchors: n_time (" + std::to_string(n_time) +
                                ") must lie in [0, " + std::to_string(frames) + "]");
  }
  std::vector<int> anchors(n_time);
  for (int j = 0; j < n_time; ++j) {
    anchors[j] = static_cast<int>(static_cast<long long>(j) * frames / n_time) + 1;
  }
  return anchors;
}

MixedTokenSequence AssembleSequence(const std::vector<std::vector<double>>& text_tokens,
                                    const std::vector<std::vector<double>>& obj_embeddings,
                                    const std::vector<std::vector<double>>& fused_video,
                                    const AssemblyParams& params) {
  const int frames = static_cast<int>(fused_video.size());
  const auto& budgets = params.budgets;
  if (budgets.n_obj < 0) throw std::invalid_argument("AssembleSequence: negative n_obj");
  if (budgets.n_time > frames) {
    throw std::invalid_argument("AssembleSequence: n_time (" + std::to_string(budgets.n_time) +
                                ") exceeds frame count (" + std::to_string(frames) + ")");
  }
  std::size_t width = 0;
  if (!fused_video.empty()) {
    width = fused_video.front().size();
  } else if (!text_tokens.empty()) {
    width = text_tokens.front().size();
  }
  const auto check = [width](const std::vector<double>& v, const char* what) {
    if (v.size() != width) {
      throw std::invalid_argument(std::string("AssembleSequence: ") + what +
                                  " token width mismatch");
    }
  };

  MixedTokenSequence seq;
  seq.budgets = budgets;
  seq.tokens.reserve(text_tokens.size() + budgets.n_obj + budgets.n_time + frames);
  for (std::size_t i = 0; i < text_tokens.size(); ++i) {
    check(text_tokens[i], "TEXT");
    seq.tokens.push_back({TokenKind::kText, text_tokens[i], static_cast<int>(i)});
  }
  for (int i = 0; i < budgets.n_obj; ++i) {
    std::vector<double> v(width, 0.0);
    if (i < static_cast<int>(obj_embeddings.size())) {
      check(obj_embeddings[i], "OBJ");
      v = obj_embeddings[i];
    }
    seq.tokens.push_back({TokenKind::kObj, std::move(v), i});
  }

  const auto anchors = TimeAnchors(frames, budgets.n_time);
  if (!anchors.empty() && (params.time_projection.rows() != width ||
                           params.time_projection.cols() % 2 != 0)) {
    throw std::invalid_argument("AssembleSequence: time projection must be d_llm x even d_f");
  }
  const auto tau = frames > 0 ? NormalizeTimestamps(frames) : std::vector<double>{};
  std::size_t next_anchor = 0;
  for (int t = 1; t <= frames; ++t) {
    if (next_anchor < anchors.size() && anchors[next_anchor] == t) {
      const auto enc = SinusoidalEncoding(tau[t - 1],
                                          static_cast<int>(params.time_projection.cols()));
      const auto bin = QuantizeTime(t, frames, params.num_bins);
      seq.tokens.push_back({TokenKind::kTime, Matvec(params.time_projection, enc), bin.bin});
      ++next_anchor;
    }
    check(fused_video[t - 1], "VIDEO");
    seq.tokens.push_back({TokenKind::kVideo, fused_video[t - 1], t});
  }
  return seq;
}

std::vector<double> ObjectEmbedding(const DenseMatrix& frame_embeddings,
                                    const MaskTrack& track, const DenseMatrix& projection) {
  if (projection.cols() != frame_embeddings.cols()) {
    throw std::invalid_argument("ObjectEmbedding: projection width mismatch");
  }
  std::vector<double> mean(frame_embeddings.cols(), 0.0);
  int count = 0;
  for (std::size_t i = 0; i < track.masks.size(); ++i) {
    const int t = track.start + static_cast<int>(i);
    if (t < 1 || t > static_cast<int>(frame_embeddings.rows())) continue;
    if (track.masks[i].area() == 0) continue;
    const auto row = frame_embeddings.row(t - 1);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
    ++count;
  }
  if (count == 0) return std::vector<double>(projection.rows(), 0.0);
  for (double& v : mean) v /= count;
  return Matvec(projection, mean);
}

void WriteTokenDump(std::ostream& out, const MixedTokenSequence& seq) {
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const auto& tok = seq.tokens[i];
    nlohmann::json first4 = nlohmann::json::array();
    for (std::size_t k = 0; k < tok.vector.size() && k < 4; ++k) first4.push_back(tok.vector[k]);
    nlohmann::json obj{{"kind", TokenKindName(tok.kind)},
                       {"index", i},
                       {"vector_l2", L2Norm(tok.vector)},
                       {"first4", first4}};
    if (tok.source) obj["source"] = *tok.source;
    out << obj.dump() << '\n';
  }
}

}  // namespace groundit
