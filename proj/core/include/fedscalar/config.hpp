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
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "fedscalar/data.hpp"
#include "fedscalar/randomness.hpp"

namespace fedscalar {

enum class Algorithm { FedScalar, FedAvg };
enum class DirectionMode { Seed, FullVector };

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(DirectionMode mode);

// One training experiment. Defaults reproduce the 20-agent digits setup.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::FedScalar;
  Distribution dist = Distribution::Rademacher;
  int num_clients = 20;     // N
  int active_clients = 20;  // m
  int rounds = 10000;       // K
  int local_steps = 5;      // S
  double alpha = 0.01;
  std::size_t batch_size = 10;
  std::vector<std::size_t> layer_sizes{64, 3, 3, 3, 10};
  PartitionScheme partition_scheme = PartitionScheme::IID;
  std::size_t per_client = 80;
  std::uint64_t master_seed = 1;
  int eval_every = 50;
  std::string data_path = "data/digits.csv";
  // Divide the aggregated scalar by m instead of N.
  bool divide_by_m = false;
  DirectionMode direction_mode = DirectionMode::Seed;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Applies one `key = value` assignment. Throws ConfigError for unknown keys
// or unparsable values.
void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value);

// Flat config text: one `key = value` per line; blank lines and lines
// starting with '#' are ignored. The result is validated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical `key = value` rendering; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace fedscalar
