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

#include "fedscalar/config.hpp"
#include "fedscalar/data.hpp"
#include "fedscalar/linalg.hpp"
#include "fedscalar/model.hpp"
#include "fedscalar/randomness.hpp"

namespace fedscalar {

struct ServerState {
  std::uint64_t round = 0;
  ParamVector params;
};

// r_n^k. Zero for clients outside the round's active set.
struct ClientScalar {
  int client_id = 0;
  std::uint64_t round = 0;
  double value = 0.0;
};

struct RoundBytes {
  std::uint64_t upload = 0;
  std::uint64_t download = 0;

  friend bool operator==(const RoundBytes&, const RoundBytes&) = default;
};

class CommLedger {
 public:
  void record(RoundBytes bytes);
  const std::vector<RoundBytes>& per_round() const noexcept { return rounds_; }
  std::uint64_t total_upload() const noexcept { return total_.upload; }
  std::uint64_t total_download() const noexcept { return total_.download; }

 private:
  std::vector<RoundBytes> rounds_;
  RoundBytes total_;
};

// Metrics for one round. Evaluation fields describe x_k (the parameters the
// round started from) and are only filled on the evaluation cadence.
struct RoundRecord {
  std::uint64_t round = 0;
  std::optional<double> train_loss;
  std::optional<double> test_accuracy;
  std::optional<double> grad_norm_sq;
  std::uint64_t upload_bytes = 0;
  std::uint64_t download_bytes = 0;
};

// Read-only view of everything a round needs besides the server state.
struct Federation {
  const ExperimentConfig& cfg;
  const MlpSpec& spec;
  const Dataset& ds;
  const Partition& partition;
};

// Per-round wire bytes for `cfg` with a d-parameter model.
//   upload:   m * (header + 8)       FedScalar
//             m * (header + 8d)      FedAvg
//   download: m * (header + 8d + direction), direction = 16 (seed mode) or
//             8d (full-vector mode) for FedScalar, 0 for FedAvg.
RoundBytes account_bytes(const ExperimentConfig& cfg, std::size_t param_count);

// Upload payload bytes (no header) one active client sends per round.
std::uint64_t upload_payload_bytes(Algorithm algorithm,
                                   std::size_t param_count);

// S local SGD steps for client `client_id` (1-based) from x. The batch
// stream is keyed by (master_seed, "batch:<id>", round), so FedScalar and
// FedAvg see identical local computation under the same seed.
LocalSgdResult client_stage(const Federation& fed, int client_id,
                            const ParamVector& x, std::uint64_t round);

// Full-training-set loss and gradient norm, test accuracy.
void evaluate_into(const Federation& fed, const ParamVector& params,
                   RoundRecord& record);

struct RoundOutcome {
  ServerState next;
  RoundRecord record;
  std::vector<int> active;  // ascending client ids
  // FedScalar only: all N scalars in client order, zeros for inactive ones.
  std::vector<ClientScalar> scalars;
  std::optional<Direction> direction;
  // FedScalar only: (sum of r) / N, or / m with divide_by_m.
  double coefficient = 0.0;
  // psi_{k,S} for each active client, same order as `active`.
  std::vector<ParamVector> client_ends;
  double max_grad_norm_sq = 0.0;
};

// Server aggregation: x + (sum of scalars / divisor) * v, summing the scalars
// in the order given (ascending client id in a round). Writes the applied
// coefficient to *coefficient when non-null.
ParamVector apply_scalar_update(const ParamVector& x, const ParamVector& v,
                                std::span<const ClientScalar> scalars,
                                int divisor, double* coefficient = nullptr);

// x_{k+1} = x_k + (1/N) (sum_n r_n) v_k.
RoundOutcome fedscalar_round(const ServerState& state, const Federation& fed);

// x_{k+1} = (1/m) sum over active clients of psi_{k,S}.
RoundOutcome fedavg_round(const ServerState& state, const Federation& fed);

RoundOutcome run_round(const ServerState& state, const Federation& fed);

}  // namespace fedscalar
