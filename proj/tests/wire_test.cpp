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

#include <gtest/gtest.h>

#include <bit>

#include "fedscalar/errors.hpp"
#include "fedscalar/randomness.hpp"

namespace fedscalar::wire {
namespace {

TEST(WireTest, HeaderLayoutIsLittleEndian) {
  const Bytes b = encode_header(
      {0x0102030405060708ULL, 0x0A0B0C0DU, MessageKind::ScalarUpload});
  const Bytes expected{0x08, 0x07, 0x06, 0x05, 0x04, 0x03, 0x02, 0x01,
                       0x0D, 0x0C, 0x0B, 0x0A, 0x04, 0x00, 0x00, 0x00};
  EXPECT_EQ(b, expected);
}

TEST(WireTest, ScalarPayloadBytes) {
  // 1.0 is 0x3FF0000000000000.
  const double one = 1.0;
  const Bytes b = encode_message({3, 7, MessageKind::ScalarUpload}, {&one, 1});
  ASSERT_EQ(b.size(), kHeaderBytes + kScalarBytes);
  const Bytes payload(b.begin() + kHeaderBytes, b.end());
  EXPECT_EQ(payload, (Bytes{0, 0, 0, 0, 0, 0, 0xF0, 0x3F}));
}

// Random messages decode to exactly what was encoded, including signed zero
// and subnormals.
TEST(WireProperty, RoundTrip) {
  RngStream rng(1, "wire");
  for (int t = 0; t < 100; ++t) {
    const MessageHeader h{rng.next_u64(), static_cast<std::uint32_t>(rng.next_u64()),
                          MessageKind::ParamsUpload};
    std::vector<double> payload(rng.next_below(300));
    for (double& x : payload) x = rng.next_gaussian() * 1e3;
    if (!payload.empty()) payload[0] = -0.0;
    if (payload.size() > 1) payload[1] = 4.9e-324;
    const Bytes b = encode_message(h, payload);
    ASSERT_EQ(b.size(), kHeaderBytes + 8 * payload.size());
    EXPECT_EQ(decode_header(b), h);
    const auto back = decode_f64_payload(b);
    ASSERT_EQ(back.size(), payload.size());
    for (std::size_t i = 0; i < payload.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i]),
                std::bit_cast<std::uint64_t>(payload[i]));
    }
  }
}

TEST(WireTest, ParamsWithSeed) {
  const std::vector<double> x(259, 0.5);
  const Bytes b = encode_params_with_seed(
      {4, 0, MessageKind::ParamsWithDirectionSeed}, x, 99, 4);
  ASSERT_EQ(b.size(), kHeaderBytes + 8 * 259 + kDirectionSeedBytes);
  EXPECT_EQ(get_u64(b, kHeaderBytes + 8 * 259), 99u);
  EXPECT_EQ(get_u64(b, kHeaderBytes + 8 * 259 + 8), 4u);
}

TEST(WireTest, TruncatedInput) {
  EXPECT_THROW(decode_header(Bytes(15)), ArgumentError);
  EXPECT_THROW(decode_f64_payload(Bytes(20)), ArgumentError);
}

}  // namespace
}  // namespace fedscalar::wire
