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

#include "fedscalar/protocol.hpp"

#include <algorithm>
#include <string>

#include "fedscalar/errors.hpp"
#include "fedscalar/wire.hpp"

namespace fedscalar {
namespace {

void check_round_inputs(const ServerState& state, const Federation& fed) {
  fed.cfg.validate();
  if (state.params.size() != fed.spec.param_count()) {
    throw DimensionError("server parameters do not match the model spec");
  }
  if (fed.partition.client_count() !=
      static_cast<std::size_t>(fed.cfg.num_clients)) {
    throw ArgumentError("partition has " +
                        std::to_string(fed.partition.client_count()) +
                        " clients, config expects " +
                        std::to_string(fed.cfg.num_clients));
  }
}

RoundOutcome begin_round(const ServerState& state, const Federation& fed) {
  check_round_inputs(state, fed);
  RoundOutcome out;
  out.record.round = state.round;
  if (state.round % static_cast<std::uint64_t>(fed.cfg.eval_every) == 0) {
    evaluate_into(fed, state.params, out.record);
  }
  const RoundBytes bytes = account_bytes(fed.cfg, state.params.size());
  out.record.upload_bytes = bytes.upload;
  out.record.download_bytes = bytes.download;
  out.active = sample_client_set(fed.cfg.master_seed, state.round,
                                 fed.cfg.num_clients, fed.cfg.active_clients);
  return out;
}

void finish_round(const ServerState& state, RoundOutcome& out) {
  if (!out.next.params.all_finite()) {
    throw NumericError("round " + std::to_string(state.round) +
                       " produced non-finite parameters");
  }
  out.next.round = state.round + 1;
}

}  // namespace

void CommLedger::record(RoundBytes bytes) {
  rounds_.push_back(bytes);
  total_.upload += bytes.upload;
  total_.download += bytes.download;
}

std::uint64_t upload_payload_bytes(Algorithm algorithm,
                                   std::size_t param_count) {
  return algorithm == Algorithm::FedScalar ? wire::kScalarBytes
                                           : 8 * std::uint64_t{param_count};
}

RoundBytes account_bytes(const ExperimentConfig& cfg, std::size_t param_count) {
  const std::uint64_t m = static_cast<std::uint64_t>(cfg.active_clients);
  const std::uint64_t d = param_count;
  const std::uint64_t header = wire::kHeaderBytes;
  std::uint64_t direction = 0;
  if (cfg.algorithm == Algorithm::FedScalar) {
    direction = cfg.direction_mode == DirectionMode::Seed
                    ? wire::kDirectionSeedBytes
                    : 8 * d;
  }
  return RoundBytes{
      m * (header + upload_payload_bytes(cfg.algorithm, param_count)),
      m * (header + 8 * d + direction)};
}

LocalSgdResult client_stage(const Federation& fed, int client_id,
                            const ParamVector& x, std::uint64_t round) {
  if (client_id < 1 || client_id > fed.cfg.num_clients) {
    throw ArgumentError("client id " + std::to_string(client_id) +
                        " out of range");
  }
  RngStream stream(fed.cfg.master_seed, "batch:" + std::to_string(client_id),
                   round);
  const auto& pool =
      fed.partition.client_indices[static_cast<std::size_t>(client_id - 1)];
  return local_sgd(fed.spec, x, fed.ds.samples, pool, fed.cfg.local_steps,
                   fed.cfg.alpha, fed.cfg.batch_size, stream);
}

void evaluate_into(const Federation& fed, const ParamVector& params,
                   RoundRecord& record) {
  const auto train = fed.partition.train_indices();
  const auto lg = loss_and_grad(fed.spec, params, fed.ds.samples, train);
  record.train_loss = lg.loss;
  record.grad_norm_sq = norm_sq(lg.grad);
  // Degenerate splits can leave no test data; accuracy is then unreported.
  if (!fed.partition.test_indices.empty()) {
    record.test_accuracy =
        accuracy(fed.spec, params, fed.ds, fed.partition.test_indices);
  }
}

ParamVector apply_scalar_update(const ParamVector& x, const ParamVector& v,
                                std::span<const ClientScalar> scalars,
                                int divisor, double* coefficient) {
  if (divisor < 1) throw ArgumentError("aggregation divisor must be >= 1");
  double sum = 0.0;
  for (const auto& r : scalars) sum += r.value;
  const double c = sum / static_cast<double>(divisor);
  if (coefficient) *coefficient = c;
  return axpy(c, v, x);
}

RoundOutcome fedscalar_round(const ServerState& state, const Federation& fed) {
  RoundOutcome out = begin_round(state, fed);
  const auto& cfg = fed.cfg;
  out.direction = sample_direction(cfg.master_seed, state.round, cfg.dist,
                                   state.params.size());
  const ParamVector& v = out.direction->values;

  out.scalars.reserve(static_cast<std::size_t>(cfg.num_clients));
  for (int n = 1; n <= cfg.num_clients; ++n) {
    out.scalars.push_back(ClientScalar{n, state.round, 0.0});
  }
  for (int n : out.active) {
    auto local = client_stage(fed, n, state.params, state.round);
    out.max_grad_norm_sq = std::max(out.max_grad_norm_sq, local.max_grad_norm_sq);
    out.scalars[static_cast<std::size_t>(n - 1)].value = inner(local.delta, v);
    out.client_ends.push_back(std::move(local.end));
  }

  const int divisor = cfg.divide_by_m ? cfg.active_clients : cfg.num_clients;
  out.next.params = apply_scalar_update(state.params, v, out.scalars, divisor,
                                        &out.coefficient);
  finish_round(state, out);
  return out;
}

RoundOutcome fedavg_round(const ServerState& state, const Federation& fed) {
  RoundOutcome out = begin_round(state, fed);
  ParamVector sum(state.params.size());
  for (int n : out.active) {
    auto local = client_stage(fed, n, state.params, state.round);
    out.max_grad_norm_sq = std::max(out.max_grad_norm_sq, local.max_grad_norm_sq);
    axpy_into(1.0, local.end, sum);
    out.client_ends.push_back(std::move(local.end));
  }
  const double m = static_cast<double>(out.active.size());
  out.next.params = ParamVector(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) out.next.params[i] = sum[i] / m;
  finish_round(state, out);
  return out;
}

RoundOutcome run_round(const ServerState& state, const Federation& fed) {
  return fed.cfg.algorithm == Algorithm::FedScalar ? fedscalar_round(state, fed)
                                                    : fedavg_round(state, fed);
}

}  // namespace fedscalar
