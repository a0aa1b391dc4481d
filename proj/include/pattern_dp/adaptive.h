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

// Adaptive budget distribution for one private pattern type.
//
// Starting from the uniform split, each iteration probes, for every element i,
// the move "add delta to eps_i and take the compensation from every other
// element", scores each probe on historical data, and commits the single best
// probe if it beats the incumbent quality by more than improve_tol. Probes are
// evaluated on copies; they never accumulate.

#ifndef PATTERN_DP_ADAPTIVE_H_
#define PATTERN_DP_ADAPTIVE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pattern_dp/detector.h"
#include "pattern_dp/eval.h"
#include "pattern_dp/matcher.h"
#include "pattern_dp/ppm_core.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

enum class ConserveMode {
  // Compensation delta/(m-1) per other element: the total stays fixed.
  kConserving,
  // Compensation delta/m per other element: the total grows by delta/m per
  // committed move.
  kPaperLiteral,
};

struct OptimizerConfig {
  // Step size; defaults to m * eps_total / 100 when unset.
  std::optional<double> delta_eps;
  double alpha = kDefaultAlpha;
  int trials = 200;
  int max_iters = 1000;
  double improve_tol = 1e-4;
  ConserveMode conserve_mode = ConserveMode::kConserving;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct QualityEstimate {
  double q_mean = 0;
  double q_stderr = 0;
  double prec = 0;
  double rec = 0;
};

// Monte-Carlo estimate of target-detection quality under the pattern-level
// mechanism. Ground truth, the private index and the target detector are built
// once; Estimate() can then be called for many allocations.
//
// Trial t always uses the seed Derive(seed, {t}), so estimates for different
// allocations share random numbers and differences between them are not
// swamped by sampling noise.
class QualityEstimator {
 public:
  // Keeps a pointer to `historical`; it must outlive the estimator. Fails if
  // the stream contains no target instance.
  static absl::StatusOr<std::unique_ptr<QualityEstimator>> Create(
      const EventStream& historical, std::span<const PatternQuery> queries,
      double alpha);

  absl::StatusOr<QualityEstimate> Estimate(
      const std::map<std::string, BudgetAllocation>& allocations, int trials,
      uint64_t seed) const;

  const PrivateEventIndex& private_index() const { return index_; }

 private:
  QualityEstimator(const EventStream& historical,
                   std::span<const PatternQuery> queries, double alpha);

  const EventStream* stream_;
  double alpha_;
  std::vector<std::string> target_ids_;
  PrivateEventIndex index_;
  Detector target_detector_;
  PatternStream ground_;
};

// One-shot wrapper around QualityEstimator using cfg.alpha, cfg.trials and
// cfg.seed.
absl::StatusOr<QualityEstimate> EstimateQuality(
    const EventStream& historical, std::span<const PatternQuery> queries,
    const std::map<std::string, BudgetAllocation>& allocations,
    const OptimizerConfig& cfg);

struct TraceEntry {
  int iteration = 0;
  // Probed element, or -1 for the initial evaluation of the uniform split.
  int probe = -1;
  bool feasible = true;
  double q = 0;
  double q_stderr = 0;
  bool committed = false;
  std::vector<double> eps;
};

struct OptimizeResult {
  BudgetAllocation allocation;
  QualityEstimate quality;
  std::vector<TraceEntry> trace;
  int iterations = 0;
};

using QualityObjective =
    std::function<absl::StatusOr<QualityEstimate>(const BudgetAllocation&)>;

// The stepwise search against an arbitrary objective.
absl::StatusOr<OptimizeResult> OptimizeAllocation(const std::string& query_id,
                                                  size_t m, double eps_total,
                                                  const OptimizerConfig& cfg,
                                                  const QualityObjective& objective);

// Optimizes the allocation of `private_query` for detecting `target_queries`
// on historical data. Only the given private pattern is perturbed while
// scoring.
absl::StatusOr<OptimizeResult> Optimize(
    const EventStream& historical, const PatternQuery& private_query,
    std::span<const PatternQuery> target_queries, double eps_total,
    const OptimizerConfig& cfg);

}  // namespace pattern_dp

#endif  // PATTERN_DP_ADAPTIVE_H_
