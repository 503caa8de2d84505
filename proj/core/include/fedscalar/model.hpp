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
#include <span>
#include <vector>

#include "fedscalar/linalg.hpp"
#include "fedscalar/randomness.hpp"

namespace fedscalar {

// Fully connected network: ReLU on hidden layers, softmax cross-entropy on
// the output. layer_sizes = {inputs, hidden..., classes}.
//
// Flat parameter layout, layer by layer: the fan_out x fan_in weight matrix
// (row-major, one row per output unit) followed by the fan_out biases.
struct MlpSpec {
  std::vector<std::size_t> layer_sizes;

  // Throws ArgumentError unless there are >= 2 positive sizes.
  void validate() const;
  std::size_t param_count() const;
  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t class_count() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return layer_sizes.size() - 1; }
  // Offset of layer l's weight block inside the flat vector.
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
};

struct LabeledSample {
  std::vector<double> features;
  int label = 0;
};

// He-style init: weights ~ N(0, 2 / fan_in), biases zero.
ParamVector init_params(const MlpSpec& spec, RngStream& stream);

std::vector<double> logits(const MlpSpec& spec, const ParamVector& params,
                           std::span<const double> features);

// Argmax of the logits; ties go to the lowest class index.
int predict(const MlpSpec& spec, const ParamVector& params,
            std::span<const double> features);

// Mean softmax cross-entropy over `samples`, or over samples[indices] when
// indices are given. Throws DimensionError/ArgumentError on bad shapes or an
// empty batch.
double loss(const MlpSpec& spec, const ParamVector& params,
            std::span<const LabeledSample> samples);
double loss(const MlpSpec& spec, const ParamVector& params,
            std::span<const LabeledSample> samples,
            std::span<const std::size_t> indices);

struct LossAndGrad {
  double loss = 0.0;
  ParamVector grad;
};

// Exact gradient of loss() by backpropagation.
LossAndGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params,
                          std::span<const LabeledSample> samples);
LossAndGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params,
                          std::span<const LabeledSample> samples,
                          std::span<const std::size_t> indices);

ParamVector grad(const MlpSpec& spec, const ParamVector& params,
                 std::span<const LabeledSample> samples);
ParamVector grad(const MlpSpec& spec, const ParamVector& params,
                 std::span<const LabeledSample> samples,
                 std::span<const std::size_t> indices);

struct LocalSgdResult {
  ParamVector end;
  ParamVector delta;  // end - start
  // Largest ||h||^2 seen over the steps; feeds the bounded-gradient monitor.
  double max_grad_norm_sq = 0.0;
};

// Runs `steps` SGD steps from `start` on the client's local pool
// samples[pool], each step on a fresh uniformly drawn batch of batch_size
// distinct pool entries.
LocalSgdResult local_sgd(const MlpSpec& spec, const ParamVector& start,
                         std::span<const LabeledSample> samples,
                         std::span<const std::size_t> pool, int steps,
                         double alpha, std::size_t batch_size,
                         RngStream& stream);

}  // namespace fedscalar
