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

#ifndef PATTERN_DP_DETECTOR_H_
#define PATTERN_DP_DETECTOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pattern_dp/matcher.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

// Precomputes the window/partition grouping and predicate evaluation for a
// fixed stream and query set, so detection can be rerun cheaply under many
// presence masks (one per Monte-Carlo trial).
//
// The detector keeps a pointer to `stream`; the stream must outlive it.
class Detector {
 public:
  static constexpr size_t kMaxElements = 32;

  Detector(const EventStream& stream, std::span<const PatternQuery> queries);

  PatternStream Run() const;
  // present.size() must equal the stream size.
  PatternStream Run(std::span<const uint8_t> present) const;

  // Number of (query, window, partition) groups with at least one candidate.
  size_t num_groups() const { return groups_.size(); }

 private:
  struct Group {
    size_t query = 0;
    int64_t window = 0;
    std::string partition;
    // Stream positions accepted by at least one element, in stream order.
    std::vector<size_t> candidates;
    // Bit k set iff the candidate is accepted by element k.
    std::vector<uint32_t> accepts;
  };

  std::optional<std::vector<size_t>> Match(const Group& g,
                                           std::span<const uint8_t> present) const;

  const EventStream* stream_;
  std::vector<PatternQuery> queries_;
  std::vector<Group> groups_;
  std::map<std::string, Tick> windowing_;
};

}  // namespace pattern_dp

#endif  // PATTERN_DP_DETECTOR_H_
