// Copyright 2026 The FedScalar Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedscalar {

// Flat float64 parameter vector: model weights x_k, client iterates, update
// differences and gradients all live in one of these. The length is fixed at
// construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0);
  ParamVector(std::initializer_list<double> values);
  // Throws NumericError if any entry is NaN or infinite.
  explicit ParamVector(std::vector<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool all_finite() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> data_;
};

// Row-major dense matrix. Used for second moments and covariances, so it is
// square in practice, but nothing here relies on that.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  double trace() const;
  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Sum of a_i * b_i, accumulated strictly left to right so results are
// bit-reproducible. Throws DimensionError on length mismatch.
double inner(const ParamVector& a, const ParamVector& b);
double inner(std::span<const double> a, std::span<const double> b);

// y + alpha * x.
ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y);

// In-place y += alpha * x.
void axpy_into(double alpha, const ParamVector& x, ParamVector& y);

ParamVector scale(double alpha, const ParamVector& x);

// a - b.
ParamVector subtract(const ParamVector& a, const ParamVector& b);

// a * b^T, shape (a.size() x b.size()).
DenseMatrix outer(const ParamVector& a, const ParamVector& b);

double norm_sq(const ParamVector& a);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(double alpha, const DenseMatrix& m);

// Largest |a_ij - b_ij|.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_diff(const ParamVector& a, const ParamVector& b);

}  // namespace fedscalar
