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

#include "pattern_dp/stream_model.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace pattern_dp {

absl::StatusOr<EventStream> EventStream::Create(std::vector<Event> events) {
  for (size_t i = 1; i < events.size(); ++i) {
    if (events[i].seq_no <= events[i - 1].seq_no) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "seq_no must be strictly increasing: position %d has %d after %d", i,
          events[i].seq_no, events[i - 1].seq_no));
    }
    if (events[i].timestamp < events[i - 1].timestamp) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "timestamps must be non-decreasing: position %d has %d after %d", i,
          events[i].timestamp, events[i - 1].timestamp));
    }
  }
  return EventStream(std::move(events));
}

absl::StatusOr<EventStream> EventStream::CreateRenumbered(
    std::vector<Event> events) {
  for (size_t i = 0; i < events.size(); ++i) events[i].seq_no = i + 1;
  return Create(std::move(events));
}

EventStream ExtractEvents(const EventStream& raw,
                          const EventPredicate& predicate) {
  std::vector<Event> out;
  for (const Event& e : raw.events()) {
    if (predicate(e)) out.push_back(e);
  }
  // Filtering preserves order, so the invariants still hold.
  return *EventStream::CreateRenumbered(std::move(out));
}

EventStream ExtractEvents(const EventStream& raw,
                          const std::set<EventKind>& kinds) {
  return ExtractEvents(raw,
                       [&kinds](const Event& e) { return kinds.contains(e.kind); });
}

EventStream MergeStreams(std::span<const EventStream> streams) {
  struct Ref {
    Tick timestamp;
    size_t stream;
    size_t pos;
  };
  std::vector<Ref> refs;
  for (size_t s = 0; s < streams.size(); ++s) {
    for (size_t i = 0; i < streams[s].size(); ++i) {
      refs.push_back({streams[s][i].timestamp, s, i});
    }
  }
  std::stable_sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.stream < b.stream;
  });
  std::vector<Event> out;
  out.reserve(refs.size());
  for (const Ref& r : refs) out.push_back(streams[r.stream][r.pos]);
  return *EventStream::CreateRenumbered(std::move(out));
}

}  // namespace pattern_dp
