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

#include "fedscalar/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <string>

#include "fedscalar/errors.hpp"

namespace fedscalar {
namespace {

constexpr std::size_t kPixels = 64;
constexpr int kMaxPixel = 16;
constexpr int kClasses = 10;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError(what + " (line " + std::to_string(line) + ")");
}

LabeledSample parse_line(std::string_view text, std::size_t line_no) {
  LabeledSample sample;
  sample.features.reserve(kPixels);
  std::size_t field = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (;;) {
    int value = 0;
    const auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || next == p) {
      fail(line_no, "malformed field " + std::to_string(field + 1));
    }
    if (field < kPixels) {
      if (value < 0 || value > kMaxPixel) {
        fail(line_no, "pixel out of range");
      }
      sample.features.push_back(static_cast<double>(value) / kMaxPixel);
    } else if (field == kPixels) {
      if (value < 0 || value >= kClasses) fail(line_no, "label out of range");
      sample.label = value;
    } else {
      fail(line_no, "too many fields");
    }
    ++field;
    p = next;
    if (p == end) break;
    if (*p != ',') fail(line_no, "unexpected character");
    ++p;
  }
  if (field != kPixels + 1) {
    fail(line_no, "expected " + std::to_string(kPixels + 1) + " fields, got " +
                      std::to_string(field));
  }
  return sample;
}

}  // namespace

Dataset parse_digits(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ds.samples.push_back(parse_line(line, line_no));
  }
  if (ds.samples.empty()) throw DataError("digits file contains no samples");
  return ds;
}

Dataset load_digits(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open digits file: " + path.string());
  return parse_digits(in);
}

std::string_view to_string(PartitionScheme scheme) {
  return scheme == PartitionScheme::IID ? "iid" : "label_skew";
}

std::optional<PartitionScheme> parse_partition_scheme(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "iid") return PartitionScheme::IID;
  if (t == "label_skew" || t == "labelskew") return PartitionScheme::LabelSkew;
  return std::nullopt;
}

std::vector<std::size_t> Partition::train_indices() const {
  std::vector<std::size_t> out;
  for (const auto& c : client_indices) out.insert(out.end(), c.begin(), c.end());
  return out;
}

Partition partition(const Dataset& ds, int num_clients, std::size_t per_client,
                    PartitionScheme scheme, RngStream& stream) {
  if (num_clients < 1 || per_client < 1) {
    throw ArgumentError("partition: need N >= 1 and per_client >= 1");
  }
  const std::size_t train = static_cast<std::size_t>(num_clients) * per_client;
  if (train > ds.size()) {
    throw ArgumentError("partition: " + std::to_string(num_clients) + " x " +
                        std::to_string(per_client) + " exceeds " +
                        std::to_string(ds.size()) + " samples");
  }
  auto order = shuffled_indices(stream, ds.size());
  if (scheme == PartitionScheme::LabelSkew) {
    std::stable_sort(order.begin(), order.begin() + train,
                     [&](std::size_t a, std::size_t b) {
                       return ds.samples[a].label < ds.samples[b].label;
                     });
  }
  Partition out;
  out.client_indices.resize(static_cast<std::size_t>(num_clients));
  for (std::size_t n = 0; n < out.client_indices.size(); ++n) {
    const auto first = order.begin() + n * per_client;
    out.client_indices[n].assign(first, first + per_client);
  }
  out.test_indices.assign(order.begin() + train, order.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  return out;
}

double accuracy(const MlpSpec& spec, const ParamVector& params,
                const Dataset& ds, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ArgumentError("accuracy: empty index set");
  std::size_t hits = 0;
  for (std::size_t i : indices) {
    if (i >= ds.size()) throw DimensionError("accuracy: index out of range");
    const auto& s = ds.samples[i];
    if (predict(spec, params, s.features) == s.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(indices.size());
}

}  // namespace fedscalar
