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
#include <span>
#include <vector>

namespace fedscalar::wire {

// Every logical message is a 16-byte header followed by a payload. All
// integers and float64 values are little-endian.
//
//   offset  size  field
//   0       8     round   (u64)
//   8       4     sender  (u32; 0 = server, n = client n)
//   12      4     kind    (u32, MessageKind)
//   16      ...   payload
inline constexpr std::size_t kHeaderBytes = 16;
inline constexpr std::size_t kScalarBytes = 8;
// (master_seed u64, round u64)
inline constexpr std::size_t kDirectionSeedBytes = 16;

enum class MessageKind : std::uint32_t {
  // Server -> client: x_k, optionally followed by the direction.
  ParamsBroadcast = 1,
  ParamsWithDirectionSeed = 2,
  ParamsWithDirectionVector = 3,
  // Client -> server.
  ScalarUpload = 4,
  ParamsUpload = 5,
};

struct MessageHeader {
  std::uint64_t round = 0;
  std::uint32_t sender = 0;
  MessageKind kind = MessageKind::ParamsBroadcast;

  friend bool operator==(const MessageHeader&, const MessageHeader&) = default;
};

using Bytes = std::vector<std::uint8_t>;

void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
void put_f64(Bytes& out, double v);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t offset);
double get_f64(std::span<const std::uint8_t> in, std::size_t offset);

Bytes encode_header(const MessageHeader& header);
// Throws ArgumentError if fewer than kHeaderBytes are available.
MessageHeader decode_header(std::span<const std::uint8_t> in);

// Header + float64 payload.
Bytes encode_message(const MessageHeader& header,
                     std::span<const double> payload);
// Header + x_k + (seed, round).
Bytes encode_params_with_seed(const MessageHeader& header,
                              std::span<const double> params,
                              std::uint64_t master_seed, std::uint64_t round);

// Decodes the float64 payload following the header. Throws ArgumentError if
// the remaining length is not a multiple of 8.
std::vector<double> decode_f64_payload(std::span<const std::uint8_t> in);

}  // namespace fedscalar::wire
