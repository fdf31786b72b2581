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

#include "groundit/latent_io.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "groundit/errors.h"

namespace groundit {

static_assert(std::endian::native == std::endian::little,
              "matrix files are written in host byte order");

namespace {

// Guards against absurd headers before allocating.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename T>
void WritePod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool ReadPod(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

}  // namespace

void WriteMatrix(std::ostream& out, const DenseMatrix& m) {
  WritePod<std::uint64_t>(out, m.rows());
  WritePod<std::uint64_t>(out, m.cols());
  const auto v = m.values();
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

DenseMatrix ReadMatrix(std::istream& in) {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  if (!ReadPod(in, rows) || !ReadPod(in, cols)) {
    throw SchemaError("matrix file: truncated header", 0);
  }
  if (cols != 0 && rows > kMaxElements / cols) {
    throw SchemaError("matrix file: header declares too many values", 0);
  }
  std::vector<double> values(rows * cols);
  if (!in.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(double)))) {
    throw SchemaError("matrix file: expected " + std::to_string(rows * cols) + " values", 0);
  }
  try {
    return DenseMatrix(rows, cols, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("matrix file: ") + e.what(), 0);
  }
}

void WriteMatrixFile(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  WriteMatrix(out, m);
}

DenseMatrix ReadMatrixFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path, 0);
  return ReadMatrix(in);
}

}  // namespace groundit
