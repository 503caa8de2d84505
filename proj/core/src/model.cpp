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

#include "fedscalar/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedscalar/errors.hpp"

namespace fedscalar {
namespace {

void check_params(const MlpSpec& spec, const ParamVector& params) {
  spec.validate();
  if (params.size() != spec.param_count()) {
    throw DimensionError("parameter vector has length " +
                         std::to_string(params.size()) + ", spec needs " +
                         std::to_string(spec.param_count()));
  }
}

void check_sample(const MlpSpec& spec, const LabeledSample& s) {
  if (s.features.size() != spec.input_size()) {
    throw DimensionError("sample has " + std::to_string(s.features.size()) +
                         " features, spec expects " +
                         std::to_string(spec.input_size()));
  }
  if (s.label < 0 || static_cast<std::size_t>(s.label) >= spec.class_count()) {
    throw ArgumentError("sample label " + std::to_string(s.label) +
                        " out of range");
  }
}

// Activations for one forward pass: acts[0] is the input, acts[l+1] the
// output of layer l (post-ReLU for hidden layers, raw logits for the last).
struct Workspace {
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> deltas;

  explicit Workspace(const MlpSpec& spec) {
    acts.resize(spec.layer_sizes.size());
    deltas.resize(spec.layer_sizes.size());
    for (std::size_t l = 0; l < spec.layer_sizes.size(); ++l) {
      acts[l].assign(spec.layer_sizes[l], 0.0);
      deltas[l].assign(spec.layer_sizes[l], 0.0);
    }
  }
};

void forward(const MlpSpec& spec, std::span<const double> w,
             std::span<const double> features, Workspace& ws) {
  std::copy(features.begin(), features.end(), ws.acts[0].begin());
  const std::size_t layers = spec.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t fan_in = spec.layer_sizes[l];
    const std::size_t fan_out = spec.layer_sizes[l + 1];
    const double* weights = w.data() + spec.weight_offset(l);
    const double* bias = w.data() + spec.bias_offset(l);
    const auto& in = ws.acts[l];
    auto& out = ws.acts[l + 1];
    const bool hidden = l + 1 < layers;
    for (std::size_t o = 0; o < fan_out; ++o) {
      double z = bias[o];
      const double* row = weights + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) z += row[i] * in[i];
      out[o] = hidden ? std::max(z, 0.0) : z;
    }
  }
}

// Cross-entropy of the logits against `label`, written in a form that stays
// accurate when the correct class dominates.
double cross_entropy(std::span<const double> z, int label) {
  const std::size_t top =
      static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  double rest = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (c != top) rest += std::exp(z[c] - z[top]);
  }
  return (z[top] - z[static_cast<std::size_t>(label)]) + std::log1p(rest);
}

// Backpropagates one sample (forward pass already in ws) and adds
// scale * dloss/dparams into g. Returns the sample loss.
double accumulate_sample(const MlpSpec& spec, std::span<const double> w,
                         int label, double scale, Workspace& ws,
                         std::span<double> g) {
  const std::size_t layers = spec.layer_count();
  const auto& z = ws.acts[layers];
  const double sample_loss = cross_entropy(z, label);

  const double zmax = *std::max_element(z.begin(), z.end());
  double denom = 0.0;
  for (double zc : z) denom += std::exp(zc - zmax);
  auto& top = ws.deltas[layers];
  for (std::size_t c = 0; c < z.size(); ++c) {
    top[c] = std::exp(z[c] - zmax) / denom;
  }
  top[static_cast<std::size_t>(label)] -= 1.0;

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t fan_in = spec.layer_sizes[l];
    const std::size_t fan_out = spec.layer_sizes[l + 1];
    const double* weights = w.data() + spec.weight_offset(l);
    double* gw = g.data() + spec.weight_offset(l);
    double* gb = g.data() + spec.bias_offset(l);
    const auto& in = ws.acts[l];
    const auto& delta = ws.deltas[l + 1];
    for (std::size_t o = 0; o < fan_out; ++o) {
      const double d = scale * delta[o];
      gb[o] += d;
      double* row = gw + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) row[i] += d * in[i];
    }
    if (l == 0) break;
    auto& below = ws.deltas[l];
    for (std::size_t i = 0; i < fan_in; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < fan_out; ++o) {
        acc += weights[o * fan_in + i] * delta[o];
      }
      // in[i] is post-ReLU; zero means the unit was inactive.
      below[i] = in[i] > 0.0 ? acc : 0.0;
    }
  }
  return sample_loss;
}

template <typename IndexFn>
LossAndGrad loss_and_grad_impl(const MlpSpec& spec, const ParamVector& params,
                               std::span<const LabeledSample> samples,
                               std::size_t count, IndexFn index_of) {
  check_params(spec, params);
  if (count == 0) throw ArgumentError("loss: empty batch");
  Workspace ws(spec);
  LossAndGrad out{0.0, ParamVector(params.size())};
  const double scale = 1.0 / static_cast<double>(count);
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const LabeledSample& s = samples[index_of(k)];
    check_sample(spec, s);
    forward(spec, params.values(), s.features, ws);
    total += accumulate_sample(spec, params.values(), s.label, scale, ws,
                               out.grad.values());
  }
  out.loss = total / static_cast<double>(count);
  return out;
}

template <typename IndexFn>
double loss_impl(const MlpSpec& spec, const ParamVector& params,
                 std::span<const LabeledSample> samples, std::size_t count,
                 IndexFn index_of) {
  check_params(spec, params);
  if (count == 0) throw ArgumentError("loss: empty batch");
  Workspace ws(spec);
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const LabeledSample& s = samples[index_of(k)];
    check_sample(spec, s);
    forward(spec, params.values(), s.features, ws);
    total += cross_entropy(ws.acts.back(), s.label);
  }
  return total / static_cast<double>(count);
}

std::span<const std::size_t> checked(std::span<const LabeledSample> samples,
                                     std::span<const std::size_t> indices) {
  for (std::size_t i : indices) {
    if (i >= samples.size()) {
      throw DimensionError("sample index " + std::to_string(i) +
                           " out of range");
    }
  }
  return indices;
}

}  // namespace

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw ArgumentError("MlpSpec: need at least input and output layer sizes");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ArgumentError("MlpSpec: layer sizes must be positive");
  }
}

std::size_t MlpSpec::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  }
  return n;
}

std::size_t MlpSpec::weight_offset(std::size_t layer) const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  }
  return n;
}

std::size_t MlpSpec::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + layer_sizes[layer] * layer_sizes[layer + 1];
}

ParamVector init_params(const MlpSpec& spec, RngStream& stream) {
  spec.validate();
  ParamVector params(spec.param_count());
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::size_t fan_in = spec.layer_sizes[l];
    const std::size_t fan_out = spec.layer_sizes[l + 1];
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    const std::size_t base = spec.weight_offset(l);
    for (std::size_t k = 0; k < fan_in * fan_out; ++k) {
      params[base + k] = sd * stream.next_gaussian();
    }
  }
  return params;
}

std::vector<double> logits(const MlpSpec& spec, const ParamVector& params,
                           std::span<const double> features) {
  check_params(spec, params);
  if (features.size() != spec.input_size()) {
    throw DimensionError("logits: feature length mismatch");
  }
  Workspace ws(spec);
  forward(spec, params.values(), features, ws);
  return ws.acts.back();
}

int predict(const MlpSpec& spec, const ParamVector& params,
            std::span<const double> features) {
  const auto z = logits(spec, params, features);
  // max_element returns the first maximum, which is the lowest class index.
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double loss(const MlpSpec& spec, const ParamVector& params,
            std::span<const LabeledSample> samples) {
  return loss_impl(spec, params, samples, samples.size(),
                   [](std::size_t k) { return k; });
}

double loss(const MlpSpec& spec, const ParamVector& params,
            std::span<const LabeledSample> samples,
            std::span<const std::size_t> indices) {
  checked(samples, indices);
  return loss_impl(spec, params, samples, indices.size(),
                   [&](std::size_t k) { return indices[k]; });
}

LossAndGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params,
                          std::span<const LabeledSample> samples) {
  return loss_and_grad_impl(spec, params, samples, samples.size(),
                            [](std::size_t k) { return k; });
}

LossAndGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params,
                          std::span<const LabeledSample> samples,
                          std::span<const std::size_t> indices) {
  checked(samples, indices);
  return loss_and_grad_impl(spec, params, samples, indices.size(),
                            [&](std::size_t k) { return indices[k]; });
}

ParamVector grad(const MlpSpec& spec, const ParamVector& params,
                 std::span<const LabeledSample> samples) {
  return loss_and_grad(spec, params, samples).grad;
}

ParamVector grad(const MlpSpec& spec, const ParamVector& params,
                 std::span<const LabeledSample> samples,
                 std::span<const std::size_t> indices) {
  return loss_and_grad(spec, params, samples, indices).grad;
}

LocalSgdResult local_sgd(const MlpSpec& spec, const ParamVector& start,
                         std::span<const LabeledSample> samples,
                         std::span<const std::size_t> pool, int steps,
                         double alpha, std::size_t batch_size,
                         RngStream& stream) {
  if (pool.empty()) throw ArgumentError("local_sgd: empty local dataset");
  if (steps < 1) throw ArgumentError("local_sgd: need at least one step");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ArgumentError("local_sgd: step size must be finite and >= 0");
  }
  checked(samples, pool);

  LocalSgdResult out{start, ParamVector(start.size()), 0.0};
  std::vector<std::size_t> batch(batch_size);
  for (int s = 0; s < steps; ++s) {
    const auto picks = sample_batch(stream, pool.size(), batch_size);
    for (std::size_t b = 0; b < picks.size(); ++b) batch[b] = pool[picks[b]];
    const ParamVector h = grad(spec, out.end, samples, batch);
    out.max_grad_norm_sq = std::max(out.max_grad_norm_sq, norm_sq(h));
    axpy_into(-alpha, h, out.end);
  }
  out.delta = subtract(out.end, start);
  return out;
}

}  // namespace fedscalar
