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

#include <gtest/gtest.h>

#include <limits>

#include "fedscalar/errors.hpp"
#include "test_support.hpp"

namespace fedscalar {
namespace {

TEST(LinalgTest, InnerExamples) {
  EXPECT_EQ(inner(ParamVector{1, 2}, ParamVector{1, -1}), -1.0);
  EXPECT_EQ(inner(ParamVector(5), ParamVector(5)), 0.0);
  EXPECT_EQ(inner(ParamVector{3, 4}, ParamVector{3, 4}), 25.0);
}

TEST(LinalgTest, InnerRejectsMismatch) {
  EXPECT_THROW(inner(ParamVector{1, 2}, ParamVector{1}), DimensionError);
}

TEST(LinalgTest, AxpyExamples) {
  EXPECT_EQ(axpy(2, ParamVector{1, 1}, ParamVector{0, 0}), (ParamVector{2, 2}));
  const ParamVector x{0.3, -7.5, 1e-9};
  const ParamVector y{4.0, 0.25, -2.0};
  EXPECT_EQ(axpy(0, x, y), y);
  EXPECT_EQ(axpy(-1, ParamVector{1, 2}, ParamVector{1, 2}), (ParamVector{0, 0}));
  EXPECT_THROW(axpy(1, ParamVector{1}, ParamVector{1, 2}), DimensionError);
}

TEST(LinalgTest, AxpyOverflowIsReported) {
  const double big = std::numeric_limits<double>::max();
  EXPECT_THROW(axpy(2.0, ParamVector{big}, ParamVector{big}), NumericError);
}

TEST(LinalgTest, OuterExamples) {
  const DenseMatrix m = outer(ParamVector{1, 2}, ParamVector{3, 4});
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_EQ(m(0, 0), 3);
  EXPECT_EQ(m(0, 1), 4);
  EXPECT_EQ(m(1, 0), 6);
  EXPECT_EQ(m(1, 1), 8);
  EXPECT_EQ(outer(ParamVector(3), ParamVector{1, 2}), DenseMatrix(3, 2));
  EXPECT_EQ(outer(ParamVector{1}, ParamVector{1})(0, 0), 1.0);
}

TEST(LinalgTest, NormSqExamples) {
  EXPECT_EQ(norm_sq(ParamVector{3, 4}), 25.0);
  EXPECT_EQ(norm_sq(ParamVector(7)), 0.0);
  EXPECT_EQ(norm_sq(ParamVector{1, 1, 1, 1}), 4.0);
}

TEST(LinalgTest, ConstructionRejectsNonFinite) {
  EXPECT_THROW(ParamVector(std::vector<double>{1.0, std::nan("")}),
               NumericError);
  EXPECT_THROW(
      ParamVector(std::vector<double>{std::numeric_limits<double>::infinity()}),
      NumericError);
}

TEST(LinalgTest, TraceAndIdentity) {
  EXPECT_EQ(DenseMatrix::identity(4).trace(), 4.0);
  EXPECT_EQ(max_abs_diff(DenseMatrix::identity(2),
                         scale(2.0, DenseMatrix::identity(2))),
            1.0);
}

// Randomized invariants over 200 vector pairs.
TEST(LinalgProperty, AlgebraicInvariants) {
  RngStream rng(42, "linalg-property");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.next_below(40);
    const ParamVector a = testing::random_params(rng, d, 10.0);
    const ParamVector b = testing::random_params(rng, d, 10.0);

    // Symmetry: each term a_i*b_i == b_i*a_i exactly and the order of the
    // accumulation is the same, so the sums agree bitwise.
    EXPECT_EQ(inner(a, b), inner(b, a));
    EXPECT_GE(norm_sq(a), 0.0);

    const DenseMatrix m = outer(a, b);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) EXPECT_EQ(m(i, j), a[i] * b[j]);
    }

    const double alpha = rng.next_gaussian();
    const ParamVector back = axpy(alpha, a, axpy(-alpha, a, b));
    for (std::size_t i = 0; i < d; ++i) {
      // Two roundings of magnitude up to |alpha*a_i|.
      const double tol =
          2.0 * std::numeric_limits<double>::epsilon() *
          (std::abs(b[i]) + std::abs(alpha * a[i]));
      EXPECT_NEAR(back[i], b[i], tol);
    }
  }
}

TEST(LinalgProperty, UnitAxpyRoundTripWithinOneUlp) {
  RngStream rng(43, "linalg-axpy");
  for (int trial = 0; trial < 200; ++trial) {
    const ParamVector x = testing::random_params(rng, 16, 1e-3);
    const ParamVector y = testing::random_params(rng, 16);
    const ParamVector back = axpy(1.0, x, axpy(-1.0, x, y));
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_LE(testing::ulp_distance(back[i], y[i]), 1) << y[i];
    }
  }
}

}  // namespace
}  // namespace fedscalar
