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

#ifndef GROUNDIT_MASK_CODEC_H_
#define GROUNDIT_MASK_CODEC_H_

#include <cstdint>
#include <vector>

namespace groundit {

// Uncompressed binary grid, row-major, one byte per pixel (0 or 1).
struct MaskGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  MaskGrid() = default;
  MaskGrid(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool operator==(const MaskGrid&) const = default;
};

// Run-length coded binary mask. Runs alternate 0-pixels and 1-pixels in
// row-major scan order, starting with the 0 count (which may be zero). Every
// later run is positive and the runs sum to width * height.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> runs;

  static BinaryMask Empty(int width, int height);
  static BinaryMask Full(int width, int height);

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  // Number of 1-pixels.
  std::size_t area() const;
  // area / pixel_count, 0 for a zero-sized mask.
  double coverage() const;

  bool operator==(const BinaryMask&) const = default;
};

BinaryMask RleEncode(const MaskGrid& grid);
// Throws CorruptMaskError when the run structure is invalid.
MaskGrid RleDecode(const BinaryMask& mask);
// Throws CorruptMaskError when the run structure is invalid.
void ValidateMask(const BinaryMask& mask);

// Pixel-wise OR computed directly on the run representation. Throws
// std::invalid_argument on an empty list or mismatched dimensions.
BinaryMask UnionMask(const std::vector<BinaryMask>& masks);

}  // namespace groundit

#endif  // GROUNDIT_MASK_CODEC_H_
