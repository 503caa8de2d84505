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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedscalar/linalg.hpp"
#include "fedscalar/randomness.hpp"

namespace fedscalar::lab {

// Moments of the aggregated update d_x = (1/N) (sum_n <delta_n, v>) v.
struct VarianceReport {
  Distribution dist = Distribution::Rademacher;
  // Number of Monte-Carlo draws; nullopt for exact enumeration.
  std::optional<std::uint64_t> sample_count;
  ParamVector mean;            // E[d_x]
  DenseMatrix second_moment;   // E[d_x d_x^T]
  DenseMatrix covariance;      // second_moment - mean mean^T
  double trace = 0.0;          // trace(covariance)
  // Monte-Carlo only: standard errors of each covariance entry and of the
  // trace, estimated from the same draws.
  std::optional<DenseMatrix> covariance_std_error;
  std::optional<double> trace_std_error;
};

// Largest d accepted by the exact enumerators (2^20 outcomes).
inline constexpr std::size_t kMaxEnumerationDim = 20;

// Monte-Carlo loops are split into this many shards with independent
// sub-streams and merged in shard order; the result does not depend on the
// number of hardware threads.
inline constexpr std::size_t kShards = 8;

// <v, g> v. Throws DimensionError on length mismatch.
ParamVector project_direction(const ParamVector& g, const ParamVector& v);
ParamVector project_direction(const ParamVector& g, const Direction& v);

struct UnbiasednessResult {
  ParamVector mean;    // average of project_direction over the draws
  double max_abs_dev;  // || mean - g ||_inf
};

UnbiasednessResult mc_unbiasedness(const ParamVector& g, Distribution dist,
                                   std::uint64_t samples, std::uint64_t seed);

struct SecondMomentEstimate {
  double value = 0.0;      // estimate of E||<v,g> v||^2 / ||g||^2
  double std_error = 0.0;  // sample standard error of `value`
};

// Throws ArgumentError for g == 0 or samples == 0.
SecondMomentEstimate mc_second_moment(const ParamVector& g, Distribution dist,
                                      std::uint64_t samples,
                                      std::uint64_t seed);

// Exact E||<v,g> v||^2 / ||g||^2 over all 2^d Rademacher vectors.
// Throws ArgumentError for g == 0 or d > kMaxEnumerationDim.
double exact_rademacher_second_moment(const ParamVector& g);

// Exact moments of d_x by enumerating all 2^d equiprobable sign vectors.
// Throws ArgumentError if the deltas are empty or d exceeds
// kMaxEnumerationDim, and DimensionError if they are ragged.
VarianceReport exact_rademacher_moments(std::span<const ParamVector> deltas);

VarianceReport mc_update_moments(std::span<const ParamVector> deltas,
                                 Distribution dist, std::uint64_t samples,
                                 std::uint64_t seed);

// Reference closed-form aggregation covariance:
//   (2/N^2) sum delta delta^T + (c/N^2) sum ||delta||^2 I - mean mean^T
// with c = 4 for Gaussian and c = 2 for Rademacher directions. Evaluated
// verbatim; it is compared against the oracles, not trusted.
DenseMatrix closed_form_covariance(std::span<const ParamVector> deltas,
                                   Distribution dist);

// Reference Gaussian-minus-Rademacher gap: (2/N^2) sum ||delta||^2 I.
DenseMatrix closed_form_variance_gap(std::span<const ParamVector> deltas);

// Mean of the deltas, (1/N) sum delta_n.
ParamVector mean_delta(std::span<const ParamVector> deltas);

}  // namespace fedscalar::lab
