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

#include "fedscalar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedscalar/errors.hpp"

namespace fedscalar {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b,
                        const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

bool finite_range(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(),
                     [](double x) { return std::isfinite(x); });
}

template <typename T>
T require_finite(T value, const char* op) {
  if (!value.all_finite()) {
    throw NumericError(std::string(op) + ": non-finite result");
  }
  return value;
}

}  // namespace

ParamVector::ParamVector(std::size_t dim, double fill) : data_(dim, fill) {}

ParamVector::ParamVector(std::initializer_list<double> values)
    : ParamVector(std::vector<double>(values)) {}

ParamVector::ParamVector(std::vector<double> values) : data_(std::move(values)) {
  if (!all_finite()) throw NumericError("ParamVector: non-finite entry");
}

bool ParamVector::all_finite() const noexcept { return finite_range(data_); }

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double DenseMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool DenseMatrix::all_finite() const noexcept { return finite_range(data_); }

double inner(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double inner(const ParamVector& a, const ParamVector& b) {
  return inner(a.values(), b.values());
}

ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y) {
  ParamVector out = y;
  axpy_into(alpha, x, out);
  return out;
}

void axpy_into(double alpha, const ParamVector& x, ParamVector& y) {
  require_same_length(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  if (!y.all_finite()) throw NumericError("axpy: non-finite result");
}

ParamVector scale(double alpha, const ParamVector& x) {
  ParamVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i];
  return require_finite(std::move(out), "scale");
}

ParamVector subtract(const ParamVector& a, const ParamVector& b) {
  require_same_length(a.size(), b.size(), "subtract");
  ParamVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return require_finite(std::move(out), "subtract");
}

DenseMatrix outer(const ParamVector& a, const ParamVector& b) {
  DenseMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  }
  return require_finite(std::move(m), "outer");
}

double norm_sq(const ParamVector& a) { return inner(a, a); }

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix out(a.rows(), a.cols());
  auto o = out.values();
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] + y[i];
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "subtract");
  DenseMatrix out(a.rows(), a.cols());
  auto o = out.values();
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] - y[i];
  return out;
}

DenseMatrix scale(double alpha, const DenseMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  auto o = out.values();
  auto x = m.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = alpha * x[i];
  return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(x[i] - y[i]));
  }
  return worst;
}

double max_abs_diff(const ParamVector& a, const ParamVector& b) {
  require_same_length(a.size(), b.size(), "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace fedscalar
