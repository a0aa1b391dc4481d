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

#ifndef PATTERN_DP_EVAL_H_
#define PATTERN_DP_EVAL_H_

#include <cstdint>
#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "pattern_dp/matcher.h"

namespace pattern_dp {

inline constexpr double kDefaultAlpha = 0.5;

// Counted over (query, window, partition) cells: a cell is a true positive if
// the target is detected in both streams, a false positive if it is only
// reported and a false negative if it is only in the ground truth.
struct ConfusionCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&,
                         const ConfusionCounts&) = default;
};

// Both streams must use the same window length for every target query.
absl::StatusOr<ConfusionCounts> Confusion(
    const PatternStream& ground, const PatternStream& reported,
    std::span<const std::string> target_ids);

// tp / (tp + fp); 0 when nothing was reported.
double Precision(const ConfusionCounts& c);
// tp / (tp + fn); 0 when there is no ground truth.
double Recall(const ConfusionCounts& c);

// alpha * Prec + (1 - alpha) * Rec. Fails without ground truth (tp + fn = 0)
// or for alpha outside [0, 1].
absl::StatusOr<double> Quality(const ConfusionCounts& c, double alpha);

// Relative quality loss (q_ord - q_ppm) / q_ord; negative when noise happens
// to help. q_ord must be positive.
absl::StatusOr<double> Mre(double q_ord, double q_ppm);

}  // namespace pattern_dp

#endif  // PATTERN_DP_EVAL_H_
