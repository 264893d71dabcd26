// Copyright 2026 The Eqlboard Authors.
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

#include <gtest/gtest.h>

#include "support/criteria.h"

namespace eql {
namespace {

#define EXPECT_OUTCOME(expr)                  \
  do {                                        \
    const criteria::Outcome o = (expr);       \
    EXPECT_TRUE(o.pass) << o.detail;          \
  } while (0)

// Smaller, differently seeded runs of the acceptance properties.
TEST(Properties, UniformWeightsReproduceAccuracy) {
  EXPECT_OUTCOME(criteria::BaselineEquivalence(101, 15));
}

TEST(Properties, MatchesDirectSummation) {
  EXPECT_OUTCOME(criteria::OracleEquivalence(102, 80));
}

TEST(Properties, ScaleInvariant) { EXPECT_OUTCOME(criteria::ScaleInvariance(103, 40)); }

TEST(Properties, FlipIncreasesScore) { EXPECT_OUTCOME(criteria::Monotonicity(104, 40)); }

TEST(Properties, AcrossBiasOnQuarterGrid) {
  EXPECT_OUTCOME(criteria::AcrossBiasRange(105, 4));
}

TEST(Properties, WithinBiasDeterministic) {
  EXPECT_OUTCOME(criteria::WithinBiasDeterminism(106));
}

TEST(Properties, WoodMonotoneInPercentage) {
  EXPECT_OUTCOME(criteria::WoodProperties(107, 5));
}

TEST(Properties, FormatsRoundTrip) { EXPECT_OUTCOME(criteria::FileRoundTrips(108)); }

}  // namespace
}  // namespace eql
