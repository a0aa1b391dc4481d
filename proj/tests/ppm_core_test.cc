//
// Copyright 2026 The Pattern DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "pattern_dp/ppm_core.h"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "pattern_dp/detector.h"
#include "pattern_dp/matcher.h"
#include "pattern_dp/rng.h"
#include "test_util.h"

namespace pattern_dp {
namespace {

using testing::Ev;
using testing::Query;
using testing::StreamOf;

constexpr double kTol = 1e-9;

TEST(EpsilonToPTest, ClosedForms) {
  EXPECT_DOUBLE_EQ(*EpsilonToP(0), 0.5);
  EXPECT_NEAR(*EpsilonToP(std::log(3.0)), 0.25, kTol);
  EXPECT_FALSE(EpsilonToP(-0.1).ok());
  EXPECT_FALSE(EpsilonToP(std::nan("")).ok());
  EXPECT_FALSE(EpsilonToP(INFINITY).ok());
}

TEST(PToEpsilonTest, RangeChecks) {
  EXPECT_NEAR(*PToEpsilon(0.25), std::log(3.0), kTol);
  EXPECT_DOUBLE_EQ(*PToEpsilon(0.5), 0.0);
  EXPECT_FALSE(PToEpsilon(0.0).ok());
  EXPECT_FALSE(PToEpsilon(0.6).ok());
}

TEST(EpsilonToPTest, RoundTrip) {
  SeededRng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double x = 10 * rng.Uniform();
    auto p = EpsilonToP(x);
    ASSERT_TRUE(p.ok());
    EXPECT_GT(*p, 0.0);
    EXPECT_LE(*p, 0.5);
    EXPECT_NEAR(*PToEpsilon(*p), x, kTol);
  }
}

TEST(UniformAllocateTest, EvenSplit) {
  auto a = UniformAllocate("q", 1.0, 4);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a->per_element, (std::vector<double>(4, 0.25)));
  EXPECT_TRUE(a->Validate().ok());
}

TEST(UniformAllocateTest, ZeroBudgetIsMaximalNoise) {
  auto a = UniformAllocate("q", 0.0, 3);
  ASSERT_TRUE(a.ok());
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a->per_element[i], 0.0);
    EXPECT_EQ(a->probs[i], 0.5);
  }
}

TEST(UniformAllocateTest, Errors) {
  EXPECT_FALSE(UniformAllocate("q", 1.0, 0).ok());
  EXPECT_FALSE(UniformAllocate("q", -1.0, 2).ok());
}

TEST(UniformAllocateTest, ComposedEpsilonEqualsTotal) {
  SeededRng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double eps = 10 * rng.Uniform();
    const size_t m = 1 + rng.Below(12);
    auto a = UniformAllocate("q", eps, m);
    ASSERT_TRUE(a.ok());
    EXPECT_NEAR(ComposedEpsilon(*a), eps, kTol);
    EXPECT_NEAR(std::accumulate(a->per_element.begin(), a->per_element.end(),
                                0.0),
                eps, kTol);
  }
}

TEST(MakeAllocationTest, TotalIsSum) {
  auto a = MakeAllocation("q", {0.5, 1.5});
  ASSERT_TRUE(a.ok());
  EXPECT_DOUBLE_EQ(a->epsilon_total, 2.0);
  EXPECT_FALSE(MakeAllocation("q", {0.5, -0.1}).ok());
  EXPECT_FALSE(MakeAllocation("q", {}).ok());
}

TEST(BudgetAllocationTest, ValidateCatchesInconsistency) {
  auto a = MakeAllocation("q", {0.5, 0.5});
  ASSERT_TRUE(a.ok());
  BudgetAllocation bad = *a;
  bad.epsilon_total = 2.0;
  EXPECT_FALSE(bad.Validate().ok());
  bad = *a;
  bad.probs[0] = 0.3;
  EXPECT_FALSE(bad.Validate().ok());
  bad = *a;
  bad.probs.pop_back();
  EXPECT_FALSE(bad.Validate().ok());
}

TEST(ComposedEpsilonTest, ClosedForms) {
  BudgetAllocation a;
  a.per_element = {std::log(3.0), std::log(3.0)};
  a.probs = {0.25, 0.25};
  EXPECT_NEAR(ComposedEpsilon(a), 2 * std::log(3.0), kTol);
  EXPECT_NEAR(ComposedEpsilon(a), 2.1972245773, 1e-9);
  a.probs = {0.25, 0.5};
  EXPECT_NEAR(ComposedEpsilon(a), std::log(3.0), kTol);
}

TEST(ComposedEpsilonTest, MonotoneInEachElement) {
  SeededRng rng(6);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> eps(1 + rng.Below(5));
    for (double& e : eps) e = 3 * rng.Uniform();
    auto a = MakeAllocation("q", eps);
    const size_t k = rng.Below(eps.size());
    eps[k] += rng.Uniform();
    auto b = MakeAllocation("q", eps);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_GE(ComposedEpsilon(*b), ComposedEpsilon(*a) - kTol);
  }
}

TEST(RandomizeTest, NoNoiseLimit) {
  SeededRng rng(7);
  int flips = 0;
  for (int i = 0; i < 10000; ++i) flips += Randomize(1, 1e-12, rng) != 1;
  EXPECT_EQ(flips, 0);
}

TEST(RandomizeTest, FlipRateAtQuarter) {
  SeededRng rng(8);
  constexpr int kN = 100000;
  int flips = 0;
  for (int i = 0; i < kN; ++i) flips += Randomize(i % 2, 0.25, rng) != i % 2;
  EXPECT_NEAR(static_cast<double>(flips) / kN, 0.25, 0.005);
}

TEST(RandomizeTest, HalfIsIndependentOfInput) {
  for (uint8_t input : {0, 1}) {
    SeededRng rng(9 + input);
    constexpr int kN = 100000;
    int ones = 0;
    for (int i = 0; i < kN; ++i) ones += Randomize(input, 0.5, rng);
    EXPECT_NEAR(static_cast<double>(ones) / kN, 0.5, 0.006);
  }
}

TEST(RandomizeTest, ConsumesOneDraw) {
  SeededRng a(10), b(10);
  Randomize(1, 0.3, a);
  b.Uniform();
  EXPECT_EQ(a.NextU64(), b.NextU64());
}

// Scenario helpers for the verifier.
NeighborPair DifferInElement(size_t m, size_t k, SeededRng& rng) {
  ScenarioInstance a{"p", std::vector<uint8_t>(m)};
  for (auto& b : a.existence) b = rng.Bernoulli(0.5);
  ScenarioInstance b = a;
  b.existence[k] ^= 1;
  return {{a}, {b}};
}

// Independent oracle: plain products of probabilities over all response
// vectors.
double OracleMaxLogRatio(const std::vector<double>& p,
                         const std::vector<uint8_t>& x,
                         const std::vector<uint8_t>& y) {
  const size_t m = p.size();
  double worst = 0;
  for (uint32_t r = 0; r < (1u << m); ++r) {
    double pa = 1, pb = 1;
    for (size_t k = 0; k < m; ++k) {
      const uint8_t bit = (r >> k) & 1u;
      pa *= bit == x[k] ? 1 - p[k] : p[k];
      pb *= bit == y[k] ? 1 - p[k] : p[k];
    }
    worst = std::max(worst, std::abs(std::log(pa / pb)));
  }
  return worst;
}

TEST(VerifyPatternLevelDpTest, SingleElement) {
  const PatternQuery q = Query("p", {0}, MatchMode::kSet, 1);
  auto alloc = MakeAllocation("p", {std::log(3.0)});
  ASSERT_TRUE(alloc.ok());
  const NeighborPair pair{{{"p", {1}}}, {{"p", {0}}}};
  auto v = VerifyPatternLevelDp(q, *alloc, pair);
  ASSERT_TRUE(v.ok());
  EXPECT_NEAR(*v, std::log(3.0), kTol);
}

TEST(VerifyPatternLevelDpTest, TwoElementsOnlyDifferingOneCounts) {
  const PatternQuery q = Query("p", {0, 1}, MatchMode::kSet, 1);
  auto alloc = MakeAllocation("p", {std::log(3.0), std::log(3.0)});
  ASSERT_TRUE(alloc.ok());
  const NeighborPair pair{{{"p", {1, 1}}}, {{"p", {0, 1}}}};
  auto v = VerifyPatternLevelDp(q, *alloc, pair);
  ASSERT_TRUE(v.ok());
  EXPECT_NEAR(*v, std::log(3.0), kTol);
  EXPECT_NEAR(*v, OracleMaxLogRatio({0.25, 0.25}, {1, 1}, {0, 1}), kTol);
}

TEST(VerifyPatternLevelDpTest, PureNoiseIsPerfectlyPrivate) {
  const PatternQuery q = Query("p", {0, 1, 2}, MatchMode::kSet, 1);
  auto alloc = UniformAllocate("p", 0.0, 3);
  ASSERT_TRUE(alloc.ok());
  const NeighborPair pair{{{"p", {1, 0, 1}}}, {{"p", {1, 0, 0}}}};
  EXPECT_NEAR(*VerifyPatternLevelDp(q, *alloc, pair), 0.0, kTol);
}

TEST(VerifyPatternLevelDpTest, BoundAndTightnessOnRandomAllocations) {
  SeededRng rng(11);
  for (int i = 0; i < 300; ++i) {
    const size_t m = 1 + rng.Below(kMaxVerifiedElements);
    std::vector<double> eps(m);
    for (double& e : eps) e = 3 * rng.Uniform();
    auto alloc = MakeAllocation("p", eps);
    ASSERT_TRUE(alloc.ok());
    PatternQuery q = Query("p", std::vector<EventKind>(m, 0), MatchMode::kSet, 1);
    const size_t k = rng.Below(m);
    NeighborPair pair = DifferInElement(m, k, rng);
    // Unrelated instances of other types and equal instances of this type.
    pair.original.push_back({"other", {1, 0}});
    pair.neighbor.push_back({"other", {1, 0}});
    pair.original.push_back(pair.original[0]);
    pair.original.back().existence = std::vector<uint8_t>(m, 1);
    pair.neighbor.push_back(pair.original.back());
    auto v = VerifyPatternLevelDp(q, *alloc, pair);
    ASSERT_TRUE(v.ok()) << v.status();
    EXPECT_LE(*v, ComposedEpsilon(*alloc) + kTol);
    EXPECT_NEAR(*v, eps[k], kTol);
    if (m <= 8) {
      EXPECT_NEAR(*v,
                  OracleMaxLogRatio(alloc->probs, pair.original[0].existence,
                                    pair.neighbor[0].existence),
                  1e-7);
    }
  }
}

TEST(VerifyPatternLevelDpTest, RejectsNonNeighbors) {
  const PatternQuery q = Query("p", {0, 1}, MatchMode::kSet, 1);
  auto alloc = UniformAllocate("p", 1.0, 2);
  ASSERT_TRUE(alloc.ok());
  // Two elements differ.
  EXPECT_FALSE(
      VerifyPatternLevelDp(q, *alloc, {{{"p", {1, 1}}}, {{"p", {0, 0}}}}).ok());
  // Nothing differs.
  EXPECT_FALSE(
      VerifyPatternLevelDp(q, *alloc, {{{"p", {1, 1}}}, {{"p", {1, 1}}}}).ok());
  // Two instances differ.
  EXPECT_FALSE(VerifyPatternLevelDp(q, *alloc,
                                    {{{"p", {1, 1}}, {"p", {1, 1}}},
                                     {{"p", {0, 1}}, {"p", {1, 0}}}})
                   .ok());
  // An instance of another type differs.
  EXPECT_FALSE(VerifyPatternLevelDp(q, *alloc,
                                    {{{"p", {1, 1}}, {"o", {1}}},
                                     {{"p", {0, 1}}, {"o", {0}}}})
                   .ok());
  // Different instance counts.
  EXPECT_FALSE(VerifyPatternLevelDp(
                   q, *alloc, {{{"p", {1, 1}}}, {{"p", {0, 1}}, {"o", {0}}}})
                   .ok());
  // Wrong number of elements.
  EXPECT_FALSE(
      VerifyPatternLevelDp(q, *alloc, {{{"p", {1, 1, 1}}}, {{"p", {0, 1, 1}}}})
          .ok());
}

// ApplyPpm ------------------------------------------------------------------

struct Fixture {
  EventStream stream;
  std::vector<PatternQuery> queries;
  PrivateEventIndex index;
};

Fixture Build(std::vector<Event> events, std::vector<PatternQuery> queries) {
  Fixture f;
  f.stream = StreamOf(std::move(events));
  f.queries = std::move(queries);
  f.index = BuildPrivateEventIndex(Detect(f.stream, f.queries), f.queries);
  return f;
}

TEST(ApplyPpmTest, NoPrivateInstancesIsIdentity) {
  const Fixture f = Build({Ev(0, 0), Ev(0, 1)},
                          {Query("p", {5}, MatchMode::kSet, 1,
                                 PrivacyRole::kPrivate)});
  SeededRng rng(1);
  auto r = ApplyPpm(f.stream, f.index, {}, rng);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->reported, (std::vector<uint8_t>{1, 1}));
  EXPECT_TRUE(r->responses.empty());
}

TEST(ApplyPpmTest, MissingOrWrongAllocationIsError) {
  const Fixture f = Build({Ev(0, 0), Ev(0, 1)},
                          {Query("p", {0, 1}, MatchMode::kSet, 1,
                                 PrivacyRole::kPrivate)});
  SeededRng rng(1);
  EXPECT_FALSE(ApplyPpm(f.stream, f.index, {}, rng).ok());
  EXPECT_FALSE(
      ApplyPpm(f.stream, f.index, {{"p", *UniformAllocate("p", 1, 3)}}, rng)
          .ok());
}

TEST(ApplyPpmTest, ZeroBudgetFlipsEachElementWithProbabilityHalf) {
  const Fixture f = Build({Ev(0, 0), Ev(0, 1), Ev(0, 2)},
                          {Query("p", {0, 1, 2}, MatchMode::kSet, 1,
                                 PrivacyRole::kPrivate)});
  const std::map<std::string, BudgetAllocation> allocs = {
      {"p", *UniformAllocate("p", 0.0, 3)}};
  SeededRng rng(2);
  constexpr int kN = 20000;
  std::vector<int> kept(3, 0);
  for (int t = 0; t < kN; ++t) {
    auto r = ApplyPpm(f.stream, f.index, allocs, rng);
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r->responses.size(), 3u);
    for (size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(r->responses[k].element, k);
      EXPECT_EQ(r->responses[k].input_bit, 1);
      EXPECT_EQ(r->responses[k].flipped, r->responses[k].output_bit == 0);
      kept[k] += r->reported[k];
    }
  }
  // sd of the rate is 0.0035; 0.015 is above 4 sd.
  for (int k : kept) EXPECT_NEAR(static_cast<double>(k) / kN, 0.5, 0.015);
}

TEST(ApplyPpmTest, LargeBudgetKeepsSharedTargetDetection) {
  // Event A is both a private element and the target.
  const Fixture f = Build(
      {Ev(0, 0), Ev(0, 1)},
      {Query("p", {0, 1}, MatchMode::kSet, 1, PrivacyRole::kPrivate),
       Query("t", {0}, MatchMode::kSet, 1, PrivacyRole::kTarget)});
  const std::vector<PatternQuery> targets = {f.queries[1]};
  const Detector det(f.stream, targets);
  auto detection_rate = [&](double eps) {
    const std::map<std::string, BudgetAllocation> allocs = {
        {"p", *UniformAllocate("p", eps, 2)}};
    SeededRng rng(3);
    int detected = 0;
    constexpr int kN = 5000;
    for (int t = 0; t < kN; ++t) {
      auto r = ApplyPpm(f.stream, f.index, allocs, rng);
      detected += !det.Run(r->reported).instances.empty();
    }
    return static_cast<double>(detected) / kN;
  };
  EXPECT_EQ(detection_rate(40.0), 1.0);
  EXPECT_NEAR(detection_rate(0.0), 0.5, 0.03);
}

TEST(ApplyPpmTest, DisjointInstancesAreIndependent) {
  const Fixture f = Build(
      {Ev(0, 0), Ev(1, 0)},
      {Query("p", {0}, MatchMode::kSet, 1, PrivacyRole::kPrivate)});
  ASSERT_EQ(f.index.instances.size(), 2u);
  const std::map<std::string, BudgetAllocation> allocs = {
      {"p", *MakeAllocation("p", {*PToEpsilon(0.3)})}};
  SeededRng rng(4);
  constexpr int kN = 100000;
  double table[2][2] = {{0, 0}, {0, 0}};
  for (int t = 0; t < kN; ++t) {
    auto r = ApplyPpm(f.stream, f.index, allocs, rng);
    table[r->reported[0]][r->reported[1]] += 1;
  }
  double chi2 = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double row = table[i][0] + table[i][1];
      const double col = table[0][j] + table[1][j];
      const double expected = row * col / kN;
      chi2 += (table[i][j] - expected) * (table[i][j] - expected) / expected;
    }
  }
  // One degree of freedom; 10.83 is the 0.001 critical value.
  EXPECT_LT(chi2, 10.83);
}

TEST(ApplyPpmTest, OverlapOnlyAddsNoise) {
  // B (position 1) is in both private instances.
  const Fixture f = Build(
      {Ev(0, 0), Ev(0, 1), Ev(0, 2)},
      {Query("p1", {0, 1}, MatchMode::kSet, 1, PrivacyRole::kPrivate),
       Query("p2", {1, 2}, MatchMode::kSet, 1, PrivacyRole::kPrivate)});
  const double p1 = 0.2, p2 = 0.3;
  const std::map<std::string, BudgetAllocation> allocs = {
      {"p1", *MakeAllocation("p1", {1.0, *PToEpsilon(p1)})},
      {"p2", *MakeAllocation("p2", {*PToEpsilon(p2), 1.0})}};
  SeededRng rng(5);
  constexpr int kN = 100000;
  int dropped = 0;
  for (int t = 0; t < kN; ++t) {
    auto r = ApplyPpm(f.stream, f.index, allocs, rng);
    ASSERT_EQ(r->responses.size(), 4u);
    dropped += r->reported[1] == 0;
  }
  const double rate = static_cast<double>(dropped) / kN;
  const double closed_form = 1 - (1 - p1) * (1 - p2);
  EXPECT_NEAR(rate, closed_form, 0.006);
  EXPECT_GT(rate, std::max(p1, p2));
}

TEST(ApplyPpmTest, Deterministic) {
  const Fixture f = Build(
      {Ev(0, 0), Ev(0, 1), Ev(1, 0), Ev(1, 1)},
      {Query("p", {0, 1}, MatchMode::kSet, 1, PrivacyRole::kPrivate)});
  const std::map<std::string, BudgetAllocation> allocs = {
      {"p", *UniformAllocate("p", 1.0, 2)}};
  SeededRng a(6), b(6);
  for (int t = 0; t < 50; ++t) {
    EXPECT_EQ(ApplyPpm(f.stream, f.index, allocs, a)->reported,
              ApplyPpm(f.stream, f.index, allocs, b)->reported);
  }
}

}  // namespace
}  // namespace pattern_dp
