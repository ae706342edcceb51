// Copyright 2026 The recflow Authors
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

#include "recflow/common.hpp"

#include <gtest/gtest.h>

#include <random>

namespace recflow {
namespace {

TEST(FixedPoint, FormatAndParseRoundTrip) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Fixed value = static_cast<Fixed>(rng() % (kWeightScale + 1));
    EXPECT_EQ(parse_fixed(format_fixed(value)), value);
  }
  EXPECT_EQ(format_fixed(412345), "0.412345");
  EXPECT_EQ(format_fixed(kWeightScale), "1.000000");
  EXPECT_EQ(format_fixed(0), "0.000000");
  EXPECT_EQ(parse_fixed("-0.5"), -500000);
  EXPECT_EQ(parse_fixed("2"), 2 * kWeightScale);
}

TEST(FixedPoint, NonCanonicalFallsBackToStrtod) {
  EXPECT_EQ(parse_fixed("5e-1"), 500000);
  EXPECT_THROW(parse_fixed("abc"), DataError);
  EXPECT_THROW(parse_fixed(""), DataError);
}

TEST(Seeds, MixedStreamsDiffer) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

TEST(Formatting, DoubleIsLocaleFreeAndStable) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(0.1 + 0.2), format_double(0.1 + 0.2));
}

}  // namespace
}  // namespace recflow
