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

#include "fedscalar/wire.hpp"

#include <bit>

#include "fedscalar/errors.hpp"

namespace fedscalar::wire {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(Bytes& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
  if (offset + 4 > in.size()) throw ArgumentError("wire: truncated u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[offset + i]} << (8 * i);
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t offset) {
  if (offset + 8 > in.size()) throw ArgumentError("wire: truncated u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[offset + i]} << (8 * i);
  return v;
}

double get_f64(std::span<const std::uint8_t> in, std::size_t offset) {
  return std::bit_cast<double>(get_u64(in, offset));
}

Bytes encode_header(const MessageHeader& header) {
  Bytes out;
  out.reserve(kHeaderBytes);
  put_u64(out, header.round);
  put_u32(out, header.sender);
  put_u32(out, static_cast<std::uint32_t>(header.kind));
  return out;
}

MessageHeader decode_header(std::span<const std::uint8_t> in) {
  if (in.size() < kHeaderBytes) throw ArgumentError("wire: truncated header");
  return MessageHeader{get_u64(in, 0), get_u32(in, 8),
                       static_cast<MessageKind>(get_u32(in, 12))};
}

Bytes encode_message(const MessageHeader& header,
                     std::span<const double> payload) {
  Bytes out = encode_header(header);
  out.reserve(kHeaderBytes + 8 * payload.size());
  for (double v : payload) put_f64(out, v);
  return out;
}

Bytes encode_params_with_seed(const MessageHeader& header,
                              std::span<const double> params,
                              std::uint64_t master_seed, std::uint64_t round) {
  Bytes out = encode_message(header, params);
  put_u64(out, master_seed);
  put_u64(out, round);
  return out;
}

std::vector<double> decode_f64_payload(std::span<const std::uint8_t> in) {
  if (in.size() < kHeaderBytes || (in.size() - kHeaderBytes) % 8 != 0) {
    throw ArgumentError("wire: payload is not a whole number of float64s");
  }
  std::vector<double> out((in.size() - kHeaderBytes) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = get_f64(in, kHeaderBytes + 8 * i);
  }
  return out;
}

}  // namespace fedscalar::wire
