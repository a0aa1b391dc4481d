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

#ifndef PATTERN_DP_MATCHER_H_
#define PATTERN_DP_MATCHER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

enum class MatchMode {
  kSequence,  // elements must occur in stream order
  kSet,       // all elements inside one window, any order
};

enum class PrivacyRole { kNone, kPrivate, kTarget };

// Accepts an event if its kind is listed and, when `cells` is present, its
// payload is one of the cells.
struct ElementPredicate {
  std::set<EventKind> kinds;
  std::optional<std::set<int64_t>> cells;

  bool Accepts(const Event& e) const;

  friend bool operator==(const ElementPredicate&,
                         const ElementPredicate&) = default;
};

// A pattern type: every instance it detects belongs to the type.
struct PatternQuery {
  std::string id;
  std::vector<ElementPredicate> elements;
  MatchMode mode = MatchMode::kSet;
  // Tumbling window length; windows are aligned at multiples of it.
  Tick window = 1;
  PrivacyRole role = PrivacyRole::kNone;
  // Detect independently per stream_id (per taxi, per user) instead of over
  // the merged stream.
  bool partition_by_stream = false;

  size_t size() const { return elements.size(); }
  absl::Status Validate() const;

  friend bool operator==(const PatternQuery&, const PatternQuery&) = default;
};

// One detected occurrence. `events[k]` matched `elements[k]` of the query and
// sits at `positions[k]` in the stream detection ran on.
struct PatternInstance {
  std::string query_id;
  std::vector<Event> events;
  std::vector<size_t> positions;
  Tick detect_time = 0;
  int64_t window = 0;
  // stream_id for partitioned queries, empty otherwise.
  std::string partition;

  friend bool operator==(const PatternInstance&,
                         const PatternInstance&) = default;
};

// Instances ordered by (detect_time, query_id, partition). `windowing` maps
// each query id to the window length used, so two pattern streams can be
// checked for comparability.
struct PatternStream {
  std::vector<PatternInstance> instances;
  std::map<std::string, Tick> windowing;

  friend bool operator==(const PatternStream&, const PatternStream&) = default;
};

int64_t WindowIndex(Tick t, Tick window);

// Reports at most one instance per (query, window[, partition]). SET mode
// picks, element by element, the earliest unused accepted event that still
// admits a complete assignment; SEQUENCE mode reports the earliest match.
// Queries must be valid.
PatternStream Detect(const EventStream& stream,
                     std::span<const PatternQuery> queries);

// As Detect, but events with present[i] == 0 are treated as absent. Positions
// in the result still index the full stream.
PatternStream DetectMasked(const EventStream& stream,
                           std::span<const uint8_t> present,
                           std::span<const PatternQuery> queries);

// True iff the instances share an event occurrence (stream_id, seq_no).
bool Overlapping(const PatternInstance& p, const PatternInstance& q);

struct Membership {
  size_t instance = 0;  // index into PrivateEventIndex::instances
  size_t element = 0;   // position within the instance

  friend bool operator==(const Membership&, const Membership&) = default;
};

// Every stream position that belongs to at least one private instance, with
// all of its memberships in instance order.
struct PrivateEventIndex {
  std::vector<PatternInstance> instances;
  std::map<size_t, std::vector<Membership>> by_position;
};

PrivateEventIndex BuildPrivateEventIndex(const PatternStream& detected,
                                         std::span<const PatternQuery> queries);

// Subset of `queries` with the given role.
std::vector<PatternQuery> QueriesWithRole(std::span<const PatternQuery> queries,
                                          PrivacyRole role);

const PatternQuery* FindQuery(std::span<const PatternQuery> queries,
                              const std::string& id);

}  // namespace pattern_dp

#endif  // PATTERN_DP_MATCHER_H_
