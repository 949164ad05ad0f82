// Copyright 2026 The dmd Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmd/tensor.hpp"

#include <utility>

#include "dmd/error.hpp"

namespace dmd {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ValidationError("Matrix: data size does not match shape");
  }
}

Tensor3::Tensor3(std::size_t channels, std::size_t height, std::size_t width,
                 std::vector<double> data)
    : channels_(channels),
      height_(height),
      width_(width),
      data_(std::move(data)) {
  if (data_.size() != channels_ * height_ * width_) {
    throw ValidationError("Tensor3: data size does not match shape");
  }
}

}  // namespace dmd
