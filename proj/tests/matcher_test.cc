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

#include "pattern_dp/matcher.h"

#include <map>
#include <optional>
#include <tuple>

#include "gtest/gtest.h"
#include "pattern_dp/datasets.h"
#include "pattern_dp/detector.h"
#include "pattern_dp/rng.h"
#include "test_util.h"

namespace pattern_dp {
namespace {

using testing::CellEv;
using testing::Ev;
using testing::Query;
using testing::StreamOf;

constexpr EventKind kA = 0, kB = 1, kC = 2;

TEST(PatternQueryTest, Validate) {
  PatternQuery q = Query("q", {kA}, MatchMode::kSet, 1);
  EXPECT_TRUE(q.Validate().ok());
  q.window = 0;
  EXPECT_FALSE(q.Validate().ok());
  q = Query("q", {}, MatchMode::kSet, 1);
  EXPECT_FALSE(q.Validate().ok());
  q = Query("", {kA}, MatchMode::kSet, 1);
  EXPECT_FALSE(q.Validate().ok());
  q = Query("q", {kA}, MatchMode::kSet, 1);
  q.elements[0].kinds.clear();
  EXPECT_FALSE(q.Validate().ok());
}

TEST(WindowIndexTest, FloorsNegativeTimes) {
  EXPECT_EQ(WindowIndex(0, 10), 0);
  EXPECT_EQ(WindowIndex(9, 10), 0);
  EXPECT_EQ(WindowIndex(10, 10), 1);
  EXPECT_EQ(WindowIndex(-1, 10), -1);
  EXPECT_EQ(WindowIndex(-10, 10), -1);
  EXPECT_EQ(WindowIndex(-11, 10), -2);
}

TEST(DetectTest, SetQueryWithAllElements) {
  const EventStream s = StreamOf({Ev(0, kC), Ev(0, kA), Ev(0, kB)});
  const std::vector<PatternQuery> q = {
      Query("p", {kA, kB, kC}, MatchMode::kSet, 1)};
  const PatternStream out = Detect(s, q);
  ASSERT_EQ(out.instances.size(), 1u);
  EXPECT_EQ(out.instances[0].positions, (std::vector<size_t>{1, 2, 0}));
  EXPECT_EQ(out.windowing.at("p"), 1);
}

TEST(DetectTest, SetQueryMissingElement) {
  const EventStream s = StreamOf({Ev(0, kA), Ev(0, kB), Ev(1, kC)});
  const std::vector<PatternQuery> q = {
      Query("p", {kA, kB, kC}, MatchMode::kSet, 1)};
  EXPECT_TRUE(Detect(s, q).instances.empty());
}

TEST(DetectTest, SequenceTakesEarliestOrderedMatch) {
  const EventStream s = StreamOf({Ev(1, kB), Ev(2, kA), Ev(3, kB)});
  const std::vector<PatternQuery> q = {
      Query("p", {kA, kB}, MatchMode::kSequence, 10)};
  const PatternStream out = Detect(s, q);
  ASSERT_EQ(out.instances.size(), 1u);
  const PatternInstance& p = out.instances[0];
  EXPECT_EQ(p.positions, (std::vector<size_t>{1, 2}));
  EXPECT_EQ(p.events[0].timestamp, 2);
  EXPECT_EQ(p.events[1].timestamp, 3);
  EXPECT_EQ(p.detect_time, 3);
}

TEST(DetectTest, OneInstancePerWindow) {
  const EventStream s =
      StreamOf({Ev(0, kA), Ev(1, kA), Ev(2, kA), Ev(5, kA)});
  const std::vector<PatternQuery> q = {Query("p", {kA}, MatchMode::kSet, 5)};
  const PatternStream out = Detect(s, q);
  ASSERT_EQ(out.instances.size(), 2u);
  EXPECT_EQ(out.instances[0].window, 0);
  EXPECT_EQ(out.instances[1].window, 1);
}

TEST(DetectTest, RepeatedKindNeedsDistinctEvents) {
  const std::vector<PatternQuery> q = {
      Query("p", {kA, kA}, MatchMode::kSet, 1)};
  EXPECT_TRUE(Detect(StreamOf({Ev(0, kA)}), q).instances.empty());
  EXPECT_EQ(Detect(StreamOf({Ev(0, kA), Ev(0, kA)}), q).instances.size(), 1u);
}

TEST(DetectTest, PartitionedQueriesMatchPerStream) {
  PatternQuery q = Query("p", {kA, kB}, MatchMode::kSet, 10);
  q.partition_by_stream = true;
  const EventStream s = StreamOf({Ev(0, kA, "x"), Ev(1, kB, "y"),
                                  Ev(2, kB, "x"), Ev(3, kA, "z")});
  const PatternStream out = Detect(s, std::vector<PatternQuery>{q});
  ASSERT_EQ(out.instances.size(), 1u);
  EXPECT_EQ(out.instances[0].partition, "x");
  q.partition_by_stream = false;
  EXPECT_EQ(Detect(s, std::vector<PatternQuery>{q}).instances.size(), 1u);
}

TEST(DetectTest, CellPredicate) {
  PatternQuery q = Query("area", {kCellEntry}, MatchMode::kSet, 100);
  q.elements[0].cells = std::set<int64_t>{7, 9};
  const EventStream s = StreamOf({CellEv(0, 3, "t"), CellEv(50, 9, "t"),
                                  CellEv(150, 4, "t")});
  const PatternStream out = Detect(s, std::vector<PatternQuery>{q});
  ASSERT_EQ(out.instances.size(), 1u);
  EXPECT_EQ(out.instances[0].positions, (std::vector<size_t>{1}));
}

// Single-event queries reduce to filtering: one instance per window holding an
// accepted event.
TEST(DetectTest, SingleElementQueryIsEventFiltering) {
  SeededRng rng(3);
  std::vector<Event> events;
  for (Tick t = 0; t < 500; ++t) {
    if (rng.Bernoulli(0.5)) events.push_back(Ev(t, rng.Bernoulli(0.5) ? kA : kB));
  }
  const EventStream s = StreamOf(events);
  const std::vector<PatternQuery> q = {Query("p", {kA}, MatchMode::kSet, 7)};
  std::set<int64_t> windows;
  for (const Event& e : s.events()) {
    if (e.kind == kA) windows.insert(WindowIndex(e.timestamp, 7));
  }
  const PatternStream out = Detect(s, q);
  std::set<int64_t> detected;
  for (const auto& p : out.instances) detected.insert(p.window);
  EXPECT_EQ(detected, windows);
}

TEST(DetectMaskedTest, AbsentEventsAreSkippedButPositionsIndexFullStream) {
  const EventStream s = StreamOf({Ev(0, kA), Ev(0, kA), Ev(0, kB)});
  const std::vector<PatternQuery> q = {Query("p", {kA, kB}, MatchMode::kSet, 1)};
  const std::vector<uint8_t> mask = {0, 1, 1};
  const PatternStream out = DetectMasked(s, mask, q);
  ASSERT_EQ(out.instances.size(), 1u);
  EXPECT_EQ(out.instances[0].positions, (std::vector<size_t>{1, 2}));
  EXPECT_TRUE(DetectMasked(s, std::vector<uint8_t>{1, 1, 0}, q).instances.empty());
}

// Brute-force oracle: in each window, enumerate every injective assignment of
// events to elements and keep the lexicographically smallest valid one (the
// detector's earliest-assignment rule). SEQUENCE also needs increasing
// positions.
std::optional<std::vector<size_t>> BruteForce(const PatternQuery& q,
                                              const std::vector<size_t>& pool,
                                              const EventStream& s) {
  std::optional<std::vector<size_t>> best;
  std::vector<size_t> current;
  std::vector<bool> used(pool.size(), false);
  auto rec = [&](auto&& self, size_t k) -> void {
    if (k == q.size()) {
      if (!best || current < *best) best = current;
      return;
    }
    for (size_t i = 0; i < pool.size(); ++i) {
      if (used[i] || !q.elements[k].Accepts(s[pool[i]])) continue;
      if (q.mode == MatchMode::kSequence && k > 0 && pool[i] <= current.back()) {
        continue;
      }
      used[i] = true;
      current.push_back(pool[i]);
      self(self, k + 1);
      current.pop_back();
      used[i] = false;
    }
  };
  rec(rec, 0);
  return best;
}

TEST(DetectTest, MatchesBruteForceOracleOnRandomStreams) {
  SeededRng rng(2024);
  for (int round = 0; round < 200; ++round) {
    std::vector<Event> events;
    Tick t = 0;
    const size_t n = 5 + rng.Below(30);
    for (size_t i = 0; i < n; ++i) {
      t += static_cast<Tick>(rng.Below(2));
      events.push_back(Ev(t, static_cast<EventKind>(rng.Below(4))));
    }
    const EventStream s = StreamOf(events);
    std::vector<PatternQuery> queries;
    for (int qi = 0; qi < 4; ++qi) {
      std::vector<EventKind> kinds;
      const size_t m = 1 + rng.Below(4);
      for (size_t k = 0; k < m; ++k) {
        kinds.push_back(static_cast<EventKind>(rng.Below(4)));
      }
      queries.push_back(Query("q" + std::to_string(qi), kinds,
                              rng.Bernoulli(0.5) ? MatchMode::kSet
                                                 : MatchMode::kSequence,
                              2 + static_cast<Tick>(rng.Below(4))));
    }
    // Optionally mask some events out.
    std::vector<uint8_t> mask(s.size(), 1);
    for (auto& b : mask) b = rng.Bernoulli(0.8);

    std::map<std::pair<std::string, int64_t>, std::vector<size_t>> expected;
    for (const PatternQuery& q : queries) {
      std::map<int64_t, std::vector<size_t>> pools;
      for (size_t i = 0; i < s.size(); ++i) {
        if (mask[i]) pools[WindowIndex(s[i].timestamp, q.window)].push_back(i);
      }
      for (const auto& [w, pool] : pools) {
        ASSERT_LE(pool.size(), 20u);
        if (auto match = BruteForce(q, pool, s)) expected[{q.id, w}] = *match;
      }
    }
    std::map<std::pair<std::string, int64_t>, std::vector<size_t>> actual;
    for (const PatternInstance& p : DetectMasked(s, mask, queries).instances) {
      EXPECT_TRUE(actual.emplace(std::make_pair(p.query_id, p.window),
                                 p.positions)
                      .second);
      for (size_t k = 0; k < p.positions.size(); ++k) {
        EXPECT_EQ(p.events[k], s[p.positions[k]]);
      }
    }
    EXPECT_EQ(actual, expected) << "round " << round;
  }
}

TEST(DetectTest, IsDeterministic) {
  SynthConfig cfg;
  cfg.seed = 9;
  cfg.n_windows = 300;
  auto synth = Synthesize(cfg);
  ASSERT_TRUE(synth.ok());
  EXPECT_EQ(Detect(synth->events, synth->queries),
            Detect(synth->events, synth->queries));
}

TEST(DetectTest, OutputIsOrderedByDetectTime) {
  SynthConfig cfg;
  cfg.seed = 10;
  cfg.n_windows = 100;
  auto synth = Synthesize(cfg);
  ASSERT_TRUE(synth.ok());
  const PatternStream out = Detect(synth->events, synth->queries);
  for (size_t i = 1; i < out.instances.size(); ++i) {
    const auto& a = out.instances[i - 1];
    const auto& b = out.instances[i];
    EXPECT_LE(std::tie(a.detect_time, a.query_id, a.partition),
              std::tie(b.detect_time, b.query_id, b.partition));
  }
}

TEST(OverlappingTest, Definition) {
  const EventStream s = StreamOf({Ev(0, kA), Ev(0, kB), Ev(0, kC)});
  PatternInstance p{"p", {s[0], s[1]}, {0, 1}, 0, 0, ""};
  PatternInstance q{"q", {s[1], s[2]}, {1, 2}, 0, 0, ""};
  PatternInstance r{"r", {s[2]}, {2}, 0, 0, ""};
  EXPECT_TRUE(Overlapping(p, q));
  EXPECT_FALSE(Overlapping(p, r));
  EXPECT_TRUE(Overlapping(p, p));
  EXPECT_TRUE(Overlapping(r, r));
}

TEST(OverlappingTest, EqualContentDifferentOccurrence) {
  const EventStream s = StreamOf({Ev(0, kA), Ev(0, kA)});
  PatternInstance p{"p", {s[0]}, {0}, 0, 0, ""};
  PatternInstance q{"q", {s[1]}, {1}, 0, 0, ""};
  EXPECT_FALSE(Overlapping(p, q));
}

TEST(PrivateEventIndexTest, OneInstanceOfThreeElements) {
  const EventStream s = StreamOf({Ev(0, kA), Ev(0, kB), Ev(0, kC), Ev(0, 9)});
  const std::vector<PatternQuery> q = {
      Query("priv", {kA, kB, kC}, MatchMode::kSet, 1, PrivacyRole::kPrivate),
      Query("tgt", {9}, MatchMode::kSet, 1, PrivacyRole::kTarget)};
  const PrivateEventIndex index = BuildPrivateEventIndex(Detect(s, q), q);
  ASSERT_EQ(index.instances.size(), 1u);
  EXPECT_EQ(index.by_position.size(), 3u);
  for (size_t pos = 0; pos < 3; ++pos) {
    EXPECT_EQ(index.by_position.at(pos),
              (std::vector<Membership>{{0, pos}}));
  }
}

TEST(PrivateEventIndexTest, NoPrivateInstances) {
  const EventStream s = StreamOf({Ev(0, kA)});
  const std::vector<PatternQuery> q = {
      Query("priv", {kB}, MatchMode::kSet, 1, PrivacyRole::kPrivate),
      Query("tgt", {kA}, MatchMode::kSet, 1, PrivacyRole::kTarget)};
  const PrivateEventIndex index = BuildPrivateEventIndex(Detect(s, q), q);
  EXPECT_TRUE(index.instances.empty());
  EXPECT_TRUE(index.by_position.empty());
}

TEST(PrivateEventIndexTest, SharedEventListsBothMemberships) {
  // Event B at position 1 belongs to both private instances.
  const EventStream s = StreamOf({Ev(0, kA), Ev(0, kB), Ev(0, kC)});
  const std::vector<PatternQuery> q = {
      Query("p1", {kA, kB}, MatchMode::kSet, 1, PrivacyRole::kPrivate),
      Query("p2", {kB, kC}, MatchMode::kSet, 1, PrivacyRole::kPrivate)};
  const PrivateEventIndex index = BuildPrivateEventIndex(Detect(s, q), q);
  ASSERT_EQ(index.instances.size(), 2u);
  // Enumerate memberships directly from the instances.
  std::map<size_t, std::vector<Membership>> oracle;
  for (size_t i = 0; i < index.instances.size(); ++i) {
    for (size_t k = 0; k < index.instances[i].positions.size(); ++k) {
      oracle[index.instances[i].positions[k]].push_back({i, k});
    }
  }
  EXPECT_EQ(index.by_position, oracle);
  EXPECT_EQ(index.by_position.at(1).size(), 2u);
  EXPECT_TRUE(Overlapping(index.instances[0], index.instances[1]));
}

TEST(QueriesWithRoleTest, FiltersAndFinds) {
  const std::vector<PatternQuery> q = {
      Query("a", {kA}, MatchMode::kSet, 1, PrivacyRole::kPrivate),
      Query("b", {kB}, MatchMode::kSet, 1, PrivacyRole::kTarget),
      Query("c", {kC}, MatchMode::kSet, 1, PrivacyRole::kPrivate)};
  const auto priv = QueriesWithRole(q, PrivacyRole::kPrivate);
  ASSERT_EQ(priv.size(), 2u);
  EXPECT_EQ(priv[1].id, "c");
  ASSERT_NE(FindQuery(q, "b"), nullptr);
  EXPECT_EQ(FindQuery(q, "b")->role, PrivacyRole::kTarget);
  EXPECT_EQ(FindQuery(q, "zz"), nullptr);
}

TEST(DetectorTest, RunMatchesDetect) {
  SynthConfig cfg;
  cfg.seed = 12;
  cfg.n_windows = 200;
  auto synth = Synthesize(cfg);
  ASSERT_TRUE(synth.ok());
  const Detector det(synth->events, synth->queries);
  EXPECT_EQ(det.Run(), Detect(synth->events, synth->queries));
  std::vector<uint8_t> mask(synth->events.size(), 1);
  SeededRng rng(1);
  for (auto& b : mask) b = rng.Bernoulli(0.7);
  EXPECT_EQ(det.Run(mask), DetectMasked(synth->events, mask, synth->queries));
}

}  // namespace
}  // namespace pattern_dp
