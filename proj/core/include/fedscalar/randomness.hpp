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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedscalar/linalg.hpp"

namespace fedscalar {

enum class Distribution { Gaussian, Rademacher };

std::string_view to_string(Distribution dist);
// Accepts "gaussian"/"normal" and "rademacher" (case-insensitive).
std::optional<Distribution> parse_distribution(std::string_view text);

// Deterministic PRNG stream keyed by (master_seed, label, index).
//
// The generator is xoshiro256** 1.0 seeded through SplitMix64; the label is
// folded in with 64-bit FNV-1a. These three algorithms are pinned: changing
// any of them changes every metrics file produced by the tool.
//
// A stream is single-owner state. Hand distinct streams to distinct workers.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view label,
            std::uint64_t index = 0);

  const std::string& label() const noexcept { return label_; }

  std::uint64_t next_u64() noexcept;
  // Uniform in [0, 1) with 53 random bits.
  double next_uniform() noexcept;
  // Uniform in [0, bound), unbiased via rejection. bound must be >= 1.
  std::uint64_t next_below(std::uint64_t bound) noexcept;
  // Standard normal via the Marsaglia polar method. The spare deviate is
  // cached, so the output depends on the full call history of the stream.
  double next_gaussian() noexcept;
  // -1.0 or +1.0 with equal probability (top bit of one draw).
  double next_rademacher() noexcept;

  // Writes one i.i.d. draw of `dist` into every element of `out`.
  void fill(Distribution dist, std::span<double> out) noexcept;

 private:
  std::array<std::uint64_t, 4> state_{};
  std::optional<double> spare_gaussian_;
  std::string label_;
};

// One per-round random direction v_k.
struct Direction {
  std::uint64_t master_seed = 0;
  std::uint64_t round = 0;
  Distribution dist = Distribution::Gaussian;
  ParamVector values;
};

// Regenerable from (master_seed, round, dist, d) alone; server and clients
// derive the same vector without shipping it. Throws ArgumentError if d == 0.
Direction sample_direction(std::uint64_t master_seed, std::uint64_t round,
                           Distribution dist, std::size_t d);

// m distinct client ids from {1..N}, uniformly without replacement, returned
// in ascending order. Throws ArgumentError unless 1 <= m <= N.
std::vector<int> sample_client_set(std::uint64_t master_seed,
                                   std::uint64_t round, int num_clients,
                                   int active_clients);

// batch_size distinct indices in [0, pool_size), uniformly without
// replacement, returned in ascending order. Throws ArgumentError unless
// 1 <= batch_size <= pool_size.
std::vector<std::size_t> sample_batch(RngStream& stream, std::size_t pool_size,
                                      std::size_t batch_size);

// Uniform random permutation of {0..n-1} (Fisher-Yates).
std::vector<std::size_t> shuffled_indices(RngStream& stream, std::size_t n);

}  // namespace fedscalar
