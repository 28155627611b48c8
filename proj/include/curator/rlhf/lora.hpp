// Copyright 2026 The Curator Authors
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

#pragma once

#include <cstddef>
#include <vector>

namespace curator::rlhf {

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

std::vector<double> matvec(const Matrix& m, const std::vector<double>& x);

// Frozen W0 (n x d) plus a rank-r adapter: A (r x d) projects the input
// down, B (n x r) projects back up. h = W0 x + B (A x).
struct LoraLayer {
  Matrix w0;
  Matrix a;
  Matrix b;

  std::size_t n() const { return w0.rows; }
  std::size_t d() const { return w0.cols; }
  std::size_t rank() const { return a.rows; }

  // Throws Error(kShapeMismatch).
  void validate() const;
};

// Throws Error(kShapeMismatch) on incompatible shapes or x.size() != d.
std::vector<double> lora_forward(const LoraLayer& layer, const std::vector<double>& x);

}  // namespace curator::rlhf
