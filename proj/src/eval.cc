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

#include "pattern_dp/eval.h"

#include <algorithm>
#include <set>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/strings/str_format.h"

namespace pattern_dp {
namespace {

std::vector<std::tuple<std::string_view, std::string_view, int64_t>> CellsOf(
    const PatternStream& s, const std::set<std::string_view>& targets) {
  std::vector<std::tuple<std::string_view, std::string_view, int64_t>> cells;
  for (const PatternInstance& inst : s.instances) {
    if (targets.contains(inst.query_id)) {
      cells.emplace_back(inst.query_id, inst.partition, inst.window);
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

}  // namespace

absl::StatusOr<ConfusionCounts> Confusion(
    const PatternStream& ground, const PatternStream& reported,
    std::span<const std::string> target_ids) {
  std::set<std::string_view> targets;
  for (const std::string& id : target_ids) {
    auto g = ground.windowing.find(id);
    auto r = reported.windowing.find(id);
    if (g == ground.windowing.end() || r == reported.windowing.end()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "target %s was not detected on both streams", id));
    }
    if (g->second != r->second) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "target %s uses window %d in the ground truth but %d in the report",
          id, g->second, r->second));
    }
    targets.insert(id);
  }
  const auto g = CellsOf(ground, targets);
  const auto r = CellsOf(reported, targets);
  ConfusionCounts c;
  size_t i = 0, j = 0;
  while (i < g.size() || j < r.size()) {
    if (j == r.size() || (i < g.size() && g[i] < r[j])) {
      ++c.fn;
      ++i;
    } else if (i == g.size() || r[j] < g[i]) {
      ++c.fp;
      ++j;
    } else {
      ++c.tp;
      ++i;
      ++j;
    }
  }
  return c;
}

double Precision(const ConfusionCounts& c) {
  const int64_t reported = c.tp + c.fp;
  return reported == 0 ? 0.0 : static_cast<double>(c.tp) / reported;
}

double Recall(const ConfusionCounts& c) {
  const int64_t truth = c.tp + c.fn;
  return truth == 0 ? 0.0 : static_cast<double>(c.tp) / truth;
}

absl::StatusOr<double> Quality(const ConfusionCounts& c, double alpha) {
  if (!(alpha >= 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be in [0, 1], got %g", alpha));
  }
  if (c.tp + c.fn == 0) {
    return absl::FailedPreconditionError(
        "quality is undefined without ground-truth target detections");
  }
  return alpha * Precision(c) + (1 - alpha) * Recall(c);
}

absl::StatusOr<double> Mre(double q_ord, double q_ppm) {
  if (!(q_ord > 0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "relative error needs a positive baseline quality, got %g", q_ord));
  }
  return (q_ord - q_ppm) / q_ord;
}

}  // namespace pattern_dp
