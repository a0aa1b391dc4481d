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

#include <algorithm>
#include <tuple>
#include <utility>

#include "absl/strings/str_format.h"
#include "pattern_dp/detector.h"

namespace pattern_dp {

bool ElementPredicate::Accepts(const Event& e) const {
  if (!kinds.contains(e.kind)) return false;
  if (cells.has_value()) {
    return e.payload.has_value() && cells->contains(*e.payload);
  }
  return true;
}

absl::Status PatternQuery::Validate() const {
  if (id.empty()) return absl::InvalidArgumentError("query id is empty");
  if (elements.empty()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("query %s: a pattern needs at least one element", id));
  }
  if (elements.size() > Detector::kMaxElements) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "query %s: at most %d elements supported", id, Detector::kMaxElements));
  }
  for (const ElementPredicate& el : elements) {
    if (el.kinds.empty()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("query %s: element with no accepted kinds", id));
    }
  }
  if (window <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("query %s: window must be positive, got %d", id,
                        window));
  }
  return absl::OkStatus();
}

int64_t WindowIndex(Tick t, Tick window) {
  int64_t q = t / window;
  if ((t % window != 0) && ((t < 0) != (window < 0))) --q;
  return q;
}

PatternStream Detect(const EventStream& stream,
                     std::span<const PatternQuery> queries) {
  return Detector(stream, queries).Run();
}

PatternStream DetectMasked(const EventStream& stream,
                           std::span<const uint8_t> present,
                           std::span<const PatternQuery> queries) {
  return Detector(stream, queries).Run(present);
}

bool Overlapping(const PatternInstance& p, const PatternInstance& q) {
  for (const Event& a : p.events) {
    for (const Event& b : q.events) {
      if (a.seq_no == b.seq_no && a.stream_id == b.stream_id) return true;
    }
  }
  return false;
}

PrivateEventIndex BuildPrivateEventIndex(
    const PatternStream& detected, std::span<const PatternQuery> queries) {
  std::set<std::string> private_ids;
  for (const PatternQuery& q : queries) {
    if (q.role == PrivacyRole::kPrivate) private_ids.insert(q.id);
  }
  PrivateEventIndex index;
  for (const PatternInstance& inst : detected.instances) {
    if (!private_ids.contains(inst.query_id)) continue;
    const size_t id = index.instances.size();
    index.instances.push_back(inst);
    for (size_t k = 0; k < inst.positions.size(); ++k) {
      index.by_position[inst.positions[k]].push_back({id, k});
    }
  }
  return index;
}

std::vector<PatternQuery> QueriesWithRole(std::span<const PatternQuery> queries,
                                          PrivacyRole role) {
  std::vector<PatternQuery> out;
  for (const PatternQuery& q : queries) {
    if (q.role == role) out.push_back(q);
  }
  return out;
}

const PatternQuery* FindQuery(std::span<const PatternQuery> queries,
                              const std::string& id) {
  for (const PatternQuery& q : queries) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

}  // namespace pattern_dp
