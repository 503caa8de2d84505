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

#include "fedscalar/randomness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "fedscalar/errors.hpp"

namespace fedscalar {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view to_string(Distribution dist) {
  return dist == Distribution::Gaussian ? "gaussian" : "rademacher";
}

std::optional<Distribution> parse_distribution(std::string_view text) {
  const std::string t = lower(text);
  if (t == "gaussian" || t == "normal") return Distribution::Gaussian;
  if (t == "rademacher") return Distribution::Rademacher;
  return std::nullopt;
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view label,
                     std::uint64_t index)
    : label_(label) {
  std::uint64_t mix = master_seed;
  std::uint64_t key = splitmix64(mix) ^ fnv1a64(label);
  std::uint64_t salt = index;
  key ^= rotl(splitmix64(salt), 17);
  for (auto& word : state_) word = splitmix64(key);
  // xoshiro must not start from the all-zero state.
  if (std::all_of(state_.begin(), state_.end(),
                  [](std::uint64_t w) { return w == 0; })) {
    state_[0] = kGolden;
  }
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::next_uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) noexcept {
  // Reject the low (2^64 mod bound) values so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double RngStream::next_gaussian() noexcept {
  if (spare_gaussian_) {
    const double v = *spare_gaussian_;
    spare_gaussian_.reset();
    return v;
  }
  for (;;) {
    const double u = 2.0 * next_uniform() - 1.0;
    const double v = 2.0 * next_uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double factor = std::sqrt(-2.0 * std::log(s) / s);
      spare_gaussian_ = v * factor;
      return u * factor;
    }
  }
}

double RngStream::next_rademacher() noexcept {
  return (next_u64() >> 63) != 0 ? 1.0 : -1.0;
}

void RngStream::fill(Distribution dist, std::span<double> out) noexcept {
  if (dist == Distribution::Gaussian) {
    for (double& x : out) x = next_gaussian();
  } else {
    for (double& x : out) x = next_rademacher();
  }
}

Direction sample_direction(std::uint64_t master_seed, std::uint64_t round,
                           Distribution dist, std::size_t d) {
  if (d == 0) throw ArgumentError("sample_direction: dimension must be >= 1");
  RngStream stream(master_seed, "direction", round);
  Direction out{master_seed, round, dist, ParamVector(d)};
  stream.fill(dist, out.values.values());
  return out;
}

std::vector<int> sample_client_set(std::uint64_t master_seed,
                                   std::uint64_t round, int num_clients,
                                   int active_clients) {
  if (num_clients < 1 || active_clients < 1 || active_clients > num_clients) {
    throw ArgumentError("sample_client_set: need 1 <= m <= N (m=" +
                        std::to_string(active_clients) +
                        ", N=" + std::to_string(num_clients) + ")");
  }
  RngStream stream(master_seed, "client-sample", round);
  const auto picks =
      sample_batch(stream, static_cast<std::size_t>(num_clients),
                   static_cast<std::size_t>(active_clients));
  std::vector<int> ids;
  ids.reserve(picks.size());
  for (std::size_t p : picks) ids.push_back(static_cast<int>(p) + 1);
  return ids;
}

std::vector<std::size_t> sample_batch(RngStream& stream, std::size_t pool_size,
                                      std::size_t batch_size) {
  if (batch_size < 1 || batch_size > pool_size) {
    throw ArgumentError("sample_batch: need 1 <= batch_size <= pool_size (" +
                        std::to_string(batch_size) + " of " +
                        std::to_string(pool_size) + ")");
  }
  std::vector<std::size_t> pool(pool_size);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first batch_size slots are a uniform sample.
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t j = i + stream.next_below(pool_size - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(batch_size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> shuffled_indices(RngStream& stream, std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = stream.next_below(i);
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

}  // namespace fedscalar
