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

#include "pattern_dp/detector.h"

#include <algorithm>
#include <functional>
#include <tuple>
#include <utility>

namespace pattern_dp {

Detector::Detector(const EventStream& stream,
                   std::span<const PatternQuery> queries)
    : stream_(&stream), queries_(queries.begin(), queries.end()) {
  for (size_t qi = 0; qi < queries_.size(); ++qi) {
    const PatternQuery& q = queries_[qi];
    windowing_[q.id] = q.window;
    // Groups of one query in creation order; partitions within a window are
    // keyed by stream id.
    std::map<std::pair<int64_t, std::string>, size_t> slot;
    for (size_t pos = 0; pos < stream.size(); ++pos) {
      const Event& e = stream[pos];
      uint32_t mask = 0;
      for (size_t k = 0; k < q.elements.size(); ++k) {
        if (q.elements[k].Accepts(e)) mask |= (1u << k);
      }
      if (mask == 0) continue;
      const int64_t w = WindowIndex(e.timestamp, q.window);
      std::string part = q.partition_by_stream ? e.stream_id : std::string();
      auto [it, inserted] =
          slot.try_emplace({w, part}, groups_.size());
      if (inserted) {
        groups_.push_back({qi, w, std::move(part), {}, {}});
      }
      Group& g = groups_[it->second];
      g.candidates.push_back(pos);
      g.accepts.push_back(mask);
    }
  }
}

std::optional<std::vector<size_t>> Detector::Match(
    const Group& g, std::span<const uint8_t> present) const {
  const PatternQuery& q = queries_[g.query];
  const size_t m = q.elements.size();
  const size_t n = g.candidates.size();
  auto live = [&](size_t c) {
    return present.empty() || present[g.candidates[c]] != 0;
  };

  // Fast reject: some element has no live candidate at all.
  uint32_t seen = 0;
  for (size_t c = 0; c < n; ++c) {
    if (live(c)) seen |= g.accepts[c];
  }
  const uint32_t all = (m == 32) ? ~0u : ((1u << m) - 1);
  if ((seen & all) != all) return std::nullopt;

  std::vector<size_t> chosen(m);
  if (q.mode == MatchMode::kSequence) {
    size_t k = 0;
    for (size_t c = 0; c < n && k < m; ++c) {
      if (live(c) && (g.accepts[c] >> k & 1u)) chosen[k++] = c;
    }
    if (k < m) return std::nullopt;
  } else {
    std::vector<uint8_t> used(n, 0);
    std::function<bool(size_t)> assign = [&](size_t k) -> bool {
      if (k == m) return true;
      for (size_t c = 0; c < n; ++c) {
        if (used[c] || !live(c) || !(g.accepts[c] >> k & 1u)) continue;
        used[c] = 1;
        chosen[k] = c;
        if (assign(k + 1)) return true;
        used[c] = 0;
      }
      return false;
    };
    if (!assign(0)) return std::nullopt;
  }
  std::vector<size_t> positions(m);
  for (size_t k = 0; k < m; ++k) positions[k] = g.candidates[chosen[k]];
  return positions;
}

PatternStream Detector::Run() const { return Run({}); }

PatternStream Detector::Run(std::span<const uint8_t> present) const {
  PatternStream out;
  out.windowing = windowing_;
  for (const Group& g : groups_) {
    auto positions = Match(g, present);
    if (!positions.has_value()) continue;
    PatternInstance inst;
    inst.query_id = queries_[g.query].id;
    inst.window = g.window;
    inst.partition = g.partition;
    inst.positions = std::move(*positions);
    inst.events.reserve(inst.positions.size());
    Tick last = (*stream_)[inst.positions.front()].timestamp;
    for (size_t pos : inst.positions) {
      inst.events.push_back((*stream_)[pos]);
      last = std::max(last, (*stream_)[pos].timestamp);
    }
    inst.detect_time = last;
    out.instances.push_back(std::move(inst));
  }
  std::stable_sort(out.instances.begin(), out.instances.end(),
                   [](const PatternInstance& a, const PatternInstance& b) {
                     return std::tie(a.detect_time, a.query_id, a.partition) <
                            std::tie(b.detect_time, b.query_id, b.partition);
                   });
  return out;
}

}  // namespace pattern_dp
