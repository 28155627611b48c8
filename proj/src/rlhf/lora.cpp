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

#include "curator/rlhf/lora.hpp"

#include <string>

#include "curator/core/error.hpp"

namespace curator::rlhf {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

}  // namespace

std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
  require(x.size() == m.cols, "vector of length " + std::to_string(x.size()) +
                                  " does not match a " + shape(m) + " matrix",
          ErrorCode::kShapeMismatch);
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

void LoraLayer::validate() const {
  require(w0.data.size() == w0.rows * w0.cols && a.data.size() == a.rows * a.cols &&
              b.data.size() == b.rows * b.cols,
          "matrix storage does not match its shape", ErrorCode::kShapeMismatch);
  require(a.rows >= 1, "LoRA rank must be >= 1", ErrorCode::kShapeMismatch);
  require(a.cols == w0.cols, "A is " + shape(a) + " but W0 is " + shape(w0),
          ErrorCode::kShapeMismatch);
  require(b.rows == w0.rows && b.cols == a.rows,
          "B is " + shape(b) + ", expected " + std::to_string(w0.rows) + "x" +
              std::to_string(a.rows),
          ErrorCode::kShapeMismatch);
}

std::vector<double> lora_forward(const LoraLayer& layer, const std::vector<double>& x) {
  layer.validate();
  auto h = matvec(layer.w0, x);
  const auto delta = matvec(layer.b, matvec(layer.a, x));
  for (std::size_t i = 0; i < h.size(); ++i) h[i] += delta[i];
  return h;
}

}  // namespace curator::rlhf
