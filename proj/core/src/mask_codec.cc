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

#include "groundit/mask_codec.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "groundit/errors.h"

namespace groundit {
namespace {

// Half-open [begin, end) ranges of 1-pixels in scan order.
using OneRanges = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

OneRanges ToRanges(const BinaryMask& mask) {
  OneRanges out;
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < mask.runs.size(); ++i) {
    const std::uint64_t len = mask.runs[i];
    if (i % 2 == 1) out.emplace_back(pos, pos + len);
    pos += len;
  }
  return out;
}

BinaryMask FromRanges(int width, int height, const OneRanges& ranges) {
  BinaryMask out{width, height, {}};
  std::uint64_t pos = 0;
  for (const auto& [b, e] : ranges) {
    out.runs.push_back(static_cast<std::uint32_t>(b - pos));
    out.runs.push_back(static_cast<std::uint32_t>(e - b));
    pos = e;
  }
  const std::uint64_t total = out.pixel_count();
  if (out.runs.empty() || pos < total) out.runs.push_back(static_cast<std::uint32_t>(total - pos));
  return out;
}

}  // namespace

BinaryMask BinaryMask::Empty(int width, int height) {
  return BinaryMask{width, height, {static_cast<std::uint32_t>(width) * height}};
}

BinaryMask BinaryMask::Full(int width, int height) {
  return BinaryMask{width, height, {0, static_cast<std::uint32_t>(width) * height}};
}

std::size_t BinaryMask::area() const {
  std::size_t a = 0;
  for (std::size_t i = 1; i < runs.size(); i += 2) a += runs[i];
  return a;
}

double BinaryMask::coverage() const {
  const std::size_t n = pixel_count();
  return n == 0 ? 0.0 : static_cast<double>(area()) / static_cast<double>(n);
}

void ValidateMask(const BinaryMask& mask) {
  if (mask.width < 0 || mask.height < 0) {
    throw CorruptMaskError("mask has negative dimensions");
  }
  if (mask.runs.empty()) throw CorruptMaskError("mask has no runs");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < mask.runs.size(); ++i) {
    if (i > 0 && mask.runs[i] == 0) {
      throw CorruptMaskError("zero-length run at index " + std::to_string(i));
    }
    sum += mask.runs[i];
  }
  if (sum != mask.pixel_count()) {
    throw CorruptMaskError("runs sum to " + std::to_string(sum) + ", expected " +
                           std::to_string(mask.pixel_count()));
  }
}

BinaryMask RleEncode(const MaskGrid& grid) {
  if (grid.width < 0 || grid.height < 0 ||
      grid.pixels.size() != static_cast<std::size_t>(grid.width) * grid.height) {
    throw std::invalid_argument("RleEncode: pixel buffer does not match dimensions");
  }
  BinaryMask out{grid.width, grid.height, {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t px : grid.pixels) {
    const std::uint8_t bit = px != 0 ? 1 : 0;
    if (bit != current) {
      out.runs.push_back(run);
      current = bit;
      run = 0;
    }
    ++run;
  }
  out.runs.push_back(run);
  return out;
}

MaskGrid RleDecode(const BinaryMask& mask) {
  ValidateMask(mask);
  MaskGrid grid(mask.width, mask.height);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < mask.runs.size(); ++i) {
    if (i % 2 == 1) {
      std::fill_n(grid.pixels.begin() + static_cast<std::ptrdiff_t>(pos), mask.runs[i], 1);
    }
    pos += mask.runs[i];
  }
  return grid;
}

BinaryMask UnionMask(const std::vector<BinaryMask>& masks) {
  if (masks.empty()) throw std::invalid_argument("UnionMask: empty mask list");
  const int w = masks.front().width;
  const int h = masks.front().height;
  OneRanges all;
  for (const auto& m : masks) {
    if (m.width != w || m.height != h) {
      throw std::invalid_argument("UnionMask: dimension mismatch (" + std::to_string(w) +
                                  "x" + std::to_string(h) + " vs " +
                                  std::to_string(m.width) + "x" +
                                  std::to_string(m.height) + ")");
    }
    ValidateMask(m);
    const auto r = ToRanges(m);
    all.insert(all.end(), r.begin(), r.end());
  }
  std::sort(all.begin(), all.end());
  OneRanges merged;
  for (const auto& range : all) {
    if (!merged.empty() && range.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, range.second);
    } else {
      merged.push_back(range);
    }
  }
  return FromRanges(w, h, merged);
}

}  // namespace groundit
