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

#include "fedscalar/estimator_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <thread>

#include "fedscalar/errors.hpp"

namespace fedscalar::lab {
namespace {

// Runs body(stream, count, acc) for each shard on its own thread. Shard s
// draws from RngStream(seed, label, s) and handles samples/kShards draws,
// plus one of the remainder when s < samples % kShards.
template <typename Acc, typename Body>
std::vector<Acc> run_shards(std::uint64_t samples, std::uint64_t seed,
                            std::string_view label, const Acc& prototype,
                            Body body) {
  std::vector<Acc> accs(kShards, prototype);
  {
    std::vector<std::jthread> workers;
    workers.reserve(kShards);
    for (std::size_t s = 0; s < kShards; ++s) {
      const std::uint64_t count =
          samples / kShards + (s < samples % kShards ? 1 : 0);
      workers.emplace_back([&, s, count] {
        RngStream stream(seed, label, s);
        body(stream, count, accs[s]);
      });
    }
  }
  return accs;
}

std::size_t common_dim(std::span<const ParamVector> deltas) {
  if (deltas.empty()) throw ArgumentError("need at least one delta");
  const std::size_t d = deltas.front().size();
  if (d == 0) throw ArgumentError("deltas must have positive length");
  for (const auto& delta : deltas) {
    if (delta.size() != d) throw DimensionError("deltas differ in length");
  }
  return d;
}

void check_enumerable(std::size_t d) {
  if (d > kMaxEnumerationDim) {
    throw ArgumentError("exact enumeration needs d <= " +
                        std::to_string(kMaxEnumerationDim) + " (got " +
                        std::to_string(d) + ")");
  }
}

// d_x for one direction: (1/N) (sum_n <delta_n, v>) v, written into out.
void aggregated_update(std::span<const ParamVector> deltas,
                       std::span<const double> v, std::span<double> out) {
  double r = 0.0;
  for (const auto& delta : deltas) r += inner(delta.values(), v);
  const double c = r / static_cast<double>(deltas.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
}

void fill_signs(std::uint64_t mask, std::span<double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = ((mask >> i) & 1U) != 0 ? 1.0 : -1.0;
  }
}

struct FirstPass {
  std::vector<double> sum;
  std::vector<double> sum_outer;
};

struct SecondPass {
  std::vector<double> sq_dev;  // per covariance entry
  double trace_sq_dev = 0.0;
};

VarianceReport finalize(Distribution dist, std::optional<std::uint64_t> count,
                        double weight, std::size_t d,
                        const std::vector<double>& sum,
                        const std::vector<double>& sum_outer) {
  VarianceReport report;
  report.dist = dist;
  report.sample_count = count;
  report.mean = ParamVector(d);
  report.second_moment = DenseMatrix(d, d);
  for (std::size_t i = 0; i < d; ++i) report.mean[i] = sum[i] / weight;
  auto sm = report.second_moment.values();
  for (std::size_t k = 0; k < d * d; ++k) sm[k] = sum_outer[k] / weight;
  report.covariance =
      subtract(report.second_moment, outer(report.mean, report.mean));
  report.trace = report.covariance.trace();
  return report;
}

}  // namespace

ParamVector project_direction(const ParamVector& g, const ParamVector& v) {
  return scale(inner(v, g), v);
}

ParamVector project_direction(const ParamVector& g, const Direction& v) {
  return project_direction(g, v.values);
}

UnbiasednessResult mc_unbiasedness(const ParamVector& g, Distribution dist,
                                   std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw ArgumentError("mc_unbiasedness: need samples >= 1");
  const std::size_t d = g.size();
  if (d == 0) throw ArgumentError("mc_unbiasedness: empty g");
  const auto shards = run_shards(
      samples, seed, "mc-unbiased", std::vector<double>(d, 0.0),
      [&](RngStream& stream, std::uint64_t count, std::vector<double>& sum) {
        std::vector<double> v(d);
        for (std::uint64_t t = 0; t < count; ++t) {
          stream.fill(dist, v);
          const double c = inner(g.values(), v);
          for (std::size_t i = 0; i < d; ++i) sum[i] += c * v[i];
        }
      });
  std::vector<double> total(d, 0.0);
  for (const auto& s : shards) {
    for (std::size_t i = 0; i < d; ++i) total[i] += s[i];
  }
  UnbiasednessResult out{ParamVector(d), 0.0};
  for (std::size_t i = 0; i < d; ++i) {
    out.mean[i] = total[i] / static_cast<double>(samples);
  }
  out.max_abs_dev = max_abs_diff(out.mean, g);
  return out;
}

SecondMomentEstimate mc_second_moment(const ParamVector& g, Distribution dist,
                                      std::uint64_t samples,
                                      std::uint64_t seed) {
  if (samples == 0) throw ArgumentError("mc_second_moment: need samples >= 1");
  const double g_sq = norm_sq(g);
  if (g_sq == 0.0) throw ArgumentError("mc_second_moment: g must be nonzero");
  const std::size_t d = g.size();
  struct Sums {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const auto shards = run_shards(
      samples, seed, "mc-second-moment", Sums{},
      [&](RngStream& stream, std::uint64_t count, Sums& acc) {
        std::vector<double> v(d);
        for (std::uint64_t t = 0; t < count; ++t) {
          stream.fill(dist, v);
          const double c = inner(g.values(), v);
          // ||c v||^2 = c^2 ||v||^2
          const double q = c * c * inner(v, v) / g_sq;
          acc.sum += q;
          acc.sum_sq += q * q;
        }
      });
  Sums total;
  for (const auto& s : shards) {
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
  }
  const double n = static_cast<double>(samples);
  SecondMomentEstimate out;
  out.value = total.sum / n;
  if (samples > 1) {
    const double var =
        std::max(0.0, (total.sum_sq - n * out.value * out.value) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

double exact_rademacher_second_moment(const ParamVector& g) {
  const double g_sq = norm_sq(g);
  if (g_sq == 0.0) {
    throw ArgumentError("exact_rademacher_second_moment: g must be nonzero");
  }
  const std::size_t d = g.size();
  check_enumerable(d);
  const std::uint64_t outcomes = std::uint64_t{1} << d;
  std::vector<double> v(d);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
    fill_signs(mask, v);
    const double c = inner(g.values(), v);
    total += c * c * inner(v, v);
  }
  return total / static_cast<double>(outcomes) / g_sq;
}

VarianceReport exact_rademacher_moments(std::span<const ParamVector> deltas) {
  const std::size_t d = common_dim(deltas);
  check_enumerable(d);
  const std::uint64_t outcomes = std::uint64_t{1} << d;
  std::vector<double> v(d), x(d), sum(d, 0.0), sum_outer(d * d, 0.0);
  for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
    fill_signs(mask, v);
    aggregated_update(deltas, v, x);
    for (std::size_t i = 0; i < d; ++i) {
      sum[i] += x[i];
      for (std::size_t j = 0; j < d; ++j) sum_outer[i * d + j] += x[i] * x[j];
    }
  }
  return finalize(Distribution::Rademacher, std::nullopt,
                  static_cast<double>(outcomes), d, sum, sum_outer);
}

VarianceReport mc_update_moments(std::span<const ParamVector> deltas,
                                 Distribution dist, std::uint64_t samples,
                                 std::uint64_t seed) {
  if (samples == 0) throw ArgumentError("mc_update_moments: need samples >= 1");
  const std::size_t d = common_dim(deltas);

  const auto first = run_shards(
      samples, seed, "mc-update", FirstPass{std::vector<double>(d, 0.0),
                                            std::vector<double>(d * d, 0.0)},
      [&](RngStream& stream, std::uint64_t count, FirstPass& acc) {
        std::vector<double> v(d), x(d);
        for (std::uint64_t t = 0; t < count; ++t) {
          stream.fill(dist, v);
          aggregated_update(deltas, v, x);
          for (std::size_t i = 0; i < d; ++i) {
            acc.sum[i] += x[i];
            for (std::size_t j = 0; j < d; ++j) {
              acc.sum_outer[i * d + j] += x[i] * x[j];
            }
          }
        }
      });
  std::vector<double> sum(d, 0.0), sum_outer(d * d, 0.0);
  for (const auto& s : first) {
    for (std::size_t i = 0; i < d; ++i) sum[i] += s.sum[i];
    for (std::size_t k = 0; k < d * d; ++k) sum_outer[k] += s.sum_outer[k];
  }
  VarianceReport report = finalize(dist, samples,
                                   static_cast<double>(samples), d, sum,
                                   sum_outer);

  // Second pass over the same draws: spread of the per-draw contributions
  // (x - mean)(x - mean)^T around the covariance gives its standard error.
  const ParamVector& mean = report.mean;
  const DenseMatrix& cov = report.covariance;
  const double trace = report.trace;
  const auto second = run_shards(
      samples, seed, "mc-update", SecondPass{std::vector<double>(d * d, 0.0)},
      [&](RngStream& stream, std::uint64_t count, SecondPass& acc) {
        std::vector<double> v(d), x(d);
        for (std::uint64_t t = 0; t < count; ++t) {
          stream.fill(dist, v);
          aggregated_update(deltas, v, x);
          double norm = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            x[i] -= mean[i];
            norm += x[i] * x[i];
          }
          for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
              const double e = x[i] * x[j] - cov(i, j);
              acc.sq_dev[i * d + j] += e * e;
            }
          }
          acc.trace_sq_dev += (norm - trace) * (norm - trace);
        }
      });
  DenseMatrix se(d, d);
  double trace_sq = 0.0;
  for (const auto& s : second) {
    auto out = se.values();
    for (std::size_t k = 0; k < d * d; ++k) out[k] += s.sq_dev[k];
    trace_sq += s.trace_sq_dev;
  }
  const double n = static_cast<double>(samples);
  const double denom = samples > 1 ? (n - 1.0) * n : 1.0;
  for (double& e : se.values()) e = samples > 1 ? std::sqrt(e / denom) : 0.0;
  report.covariance_std_error = std::move(se);
  report.trace_std_error = samples > 1 ? std::sqrt(trace_sq / denom) : 0.0;
  return report;
}

ParamVector mean_delta(std::span<const ParamVector> deltas) {
  const std::size_t d = common_dim(deltas);
  ParamVector out(d);
  for (const auto& delta : deltas) axpy_into(1.0, delta, out);
  const double n = static_cast<double>(deltas.size());
  for (std::size_t i = 0; i < d; ++i) out[i] /= n;
  return out;
}

DenseMatrix closed_form_covariance(std::span<const ParamVector> deltas,
                                   Distribution dist) {
  const std::size_t d = common_dim(deltas);
  const double n_sq = static_cast<double>(deltas.size() * deltas.size());
  DenseMatrix sum_outer(d, d);
  double sum_norm = 0.0;
  for (const auto& delta : deltas) {
    sum_outer = add(sum_outer, outer(delta, delta));
    sum_norm += norm_sq(delta);
  }
  const double identity_coeff = dist == Distribution::Gaussian ? 4.0 : 2.0;
  const ParamVector bar = mean_delta(deltas);
  DenseMatrix out = scale(2.0 / n_sq, sum_outer);
  for (std::size_t i = 0; i < d; ++i) {
    out(i, i) += identity_coeff / n_sq * sum_norm;
  }
  return subtract(out, outer(bar, bar));
}

DenseMatrix closed_form_variance_gap(std::span<const ParamVector> deltas) {
  const std::size_t d = common_dim(deltas);
  const double n_sq = static_cast<double>(deltas.size() * deltas.size());
  double sum_norm = 0.0;
  for (const auto& delta : deltas) sum_norm += norm_sq(delta);
  return scale(2.0 / n_sq * sum_norm, DenseMatrix::identity(d));
}

}  // namespace fedscalar::lab
