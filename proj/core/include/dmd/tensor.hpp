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

#ifndef DMD_TENSOR_HPP_
#define DMD_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace dmd {

// Dense row-major matrix of doubles. Also used for scan-ordered sequences,
// where each row is the feature vector at one sequence position.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Sequence = Matrix;

// Channel-major (C x H x W) feature tensor or image.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t channels, std::size_t height, std::size_t width,
          double fill = 0.0)
      : channels_(channels),
        height_(height),
        width_(width),
        data_(channels * height * width, fill) {}
  Tensor3(std::size_t channels, std::size_t height, std::size_t width,
          std::vector<double> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * height_ + y) * width_ + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height_ + y) * width_ + x];
  }
  // Pixel addressed by its row-major index p = y * width + x.
  double& at(std::size_t c, std::size_t p) { return data_[c * pixels() + p]; }
  double at(std::size_t c, std::size_t p) const {
    return data_[c * pixels() + p];
  }

  std::span<double> channel(std::size_t c) {
    return {data_.data() + c * pixels(), pixels()};
  }
  std::span<const double> channel(std::size_t c) const {
    return {data_.data() + c * pixels(), pixels()};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Tensor3& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

}  // namespace dmd

#endif  // DMD_TENSOR_HPP_
