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
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedscalar/model.hpp"
#include "fedscalar/randomness.hpp"

namespace fedscalar {

struct Dataset {
  std::vector<LabeledSample> samples;
  int class_count = 10;

  std::size_t size() const noexcept { return samples.size(); }
};

// Digits CSV: header-less, one sample per line, 64 comma-separated integer
// pixels in 0..16 followed by the label in 0..9. Pixels are scaled by 1/16.
// Throws DataError naming the offending line.
Dataset load_digits(const std::filesystem::path& path);
Dataset parse_digits(std::istream& in);

enum class PartitionScheme { IID, LabelSkew };

std::string_view to_string(PartitionScheme scheme);
std::optional<PartitionScheme> parse_partition_scheme(std::string_view text);

struct Partition {
  // client_indices[n] belongs to client id n + 1.
  std::vector<std::vector<std::size_t>> client_indices;
  std::vector<std::size_t> test_indices;

  std::size_t client_count() const noexcept { return client_indices.size(); }
  // Concatenation of all client lists in client order.
  std::vector<std::size_t> train_indices() const;
};

// Shuffles the dataset, keeps the first N * per_client indices for training
// and the rest for test. IID hands out contiguous shuffled blocks; LabelSkew
// first sorts the training indices by label (stable), so each client sees
// only one or two labels. Throws ArgumentError if there are too few samples.
Partition partition(const Dataset& ds, int num_clients, std::size_t per_client,
                    PartitionScheme scheme, RngStream& stream);

// Fraction of ds[indices] whose predicted class equals the label.
double accuracy(const MlpSpec& spec, const ParamVector& params,
                const Dataset& ds, std::span<const std::size_t> indices);

}  // namespace fedscalar
