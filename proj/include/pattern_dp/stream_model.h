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

#ifndef PATTERN_DP_STREAM_MODEL_H_
#define PATTERN_DP_STREAM_MODEL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace pattern_dp {

// Integer time. Real datasets map wall-clock time to ticks at ingestion.
using Tick = int64_t;

// Event-type symbol. Small non-negative integers for synthetic kinds; the
// GPS ingestion path uses kCellEntry with the grid cell in the payload.
using EventKind = int32_t;

inline constexpr EventKind kRawKind = -1;
inline constexpr EventKind kCellEntry = 1000;

struct Event {
  std::string stream_id;
  uint64_t seq_no = 0;
  Tick timestamp = 0;
  EventKind kind = kRawKind;
  std::optional<int64_t> payload;

  friend bool operator==(const Event&, const Event&) = default;
};

// Identity of one occurrence. Two events with identical content but different
// keys are distinct occurrences.
struct EventKey {
  std::string stream_id;
  uint64_t seq_no = 0;

  friend auto operator<=>(const EventKey&, const EventKey&) = default;
};

inline EventKey KeyOf(const Event& e) { return {e.stream_id, e.seq_no}; }

// An ordered, immutable sequence of events. seq_no is strictly increasing and
// timestamps are non-decreasing over the whole sequence.
class EventStream {
 public:
  EventStream() = default;

  // Validates the ordering invariants.
  static absl::StatusOr<EventStream> Create(std::vector<Event> events);

  // Assigns seq_no 1..n in the given order, then validates timestamps.
  static absl::StatusOr<EventStream> CreateRenumbered(std::vector<Event> events);

  std::span<const Event> events() const { return events_; }
  size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const Event& operator[](size_t i) const { return events_[i]; }

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  explicit EventStream(std::vector<Event> events)
      : events_(std::move(events)) {}

  std::vector<Event> events_;
};

using EventPredicate = std::function<bool(const Event&)>;

// Keeps events accepted by `predicate` in input order, renumbered 1..n.
EventStream ExtractEvents(const EventStream& raw,
                          const EventPredicate& predicate);

// Convenience overload: keep events whose kind is in `kinds`.
EventStream ExtractEvents(const EventStream& raw,
                          const std::set<EventKind>& kinds);

// Merges by timestamp. Events with equal timestamps keep input-stream order
// (lower index first), then their order within that stream. The result is
// renumbered 1..n.
EventStream MergeStreams(std::span<const EventStream> streams);

}  // namespace pattern_dp

#endif  // PATTERN_DP_STREAM_MODEL_H_
