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

#ifndef GROUNDIT_LATENT_IO_H_
#define GROUNDIT_LATENT_IO_H_

#include <istream>
#include <ostream>
#include <string>

#include "groundit/numerics.h"

namespace groundit {

// Binary row-major matrix file used for latents and embeddings:
//   uint64 rows (T), uint64 cols (D), then rows * cols float64 values,
//   all little-endian.
void WriteMatrix(std::ostream& out, const DenseMatrix& m);
// Throws SchemaError on a short or inconsistent file.
DenseMatrix ReadMatrix(std::istream& in);

void WriteMatrixFile(const std::string& path, const DenseMatrix& m);
DenseMatrix ReadMatrixFile(const std::string& path);

}  // namespace groundit

#endif  // GROUNDIT_LATENT_IO_H_
