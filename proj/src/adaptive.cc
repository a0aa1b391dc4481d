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

#include "pattern_dp/adaptive.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"
#include "pattern_dp/rng.h"

namespace pattern_dp {
namespace {

// Probes may land a hair below zero through rounding when an element is
// drained exactly; those are snapped to zero instead of being skipped.
constexpr double kBoundSlack = 1e-12;

std::vector<PatternQuery> Targets(std::span<const PatternQuery> queries) {
  return QueriesWithRole(queries, PrivacyRole::kTarget);
}

}  // namespace

absl::Status OptimizerConfig::Validate() const {
  if (delta_eps.has_value() && !(*delta_eps > 0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step size must be positive, got %g", *delta_eps));
  }
  if (!(alpha >= 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be in [0, 1], got %g", alpha));
  }
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (max_iters < 0) return absl::InvalidArgumentError("max_iters must be >= 0");
  if (!(improve_tol >= 0)) {
    return absl::InvalidArgumentError("improve_tol must be non-negative");
  }
  return absl::OkStatus();
}

QualityEstimator::QualityEstimator(const EventStream& historical,
                                   std::span<const PatternQuery> queries,
                                   double alpha)
    : stream_(&historical),
      alpha_(alpha),
      index_(BuildPrivateEventIndex(Detect(historical, queries), queries)),
      target_detector_(historical, Targets(queries)),
      ground_(target_detector_.Run()) {
  for (const PatternQuery& q : queries) {
    if (q.role == PrivacyRole::kTarget) target_ids_.push_back(q.id);
  }
}

absl::StatusOr<std::unique_ptr<QualityEstimator>> QualityEstimator::Create(
    const EventStream& historical, std::span<const PatternQuery> queries,
    double alpha) {
  if (!(alpha >= 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be in [0, 1], got %g", alpha));
  }
  for (const PatternQuery& q : queries) {
    if (auto s = q.Validate(); !s.ok()) return s;
  }
  std::unique_ptr<QualityEstimator> est(
      new QualityEstimator(historical, queries, alpha));
  if (est->ground_.instances.empty()) {
    return absl::FailedPreconditionError(
        "historical data contains no target pattern instance; recall is "
        "undefined");
  }
  return est;
}

absl::StatusOr<QualityEstimate> QualityEstimator::Estimate(
    const std::map<std::string, BudgetAllocation>& allocations, int trials,
    uint64_t seed) const {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  double sum_q = 0, sum_q2 = 0, sum_prec = 0, sum_rec = 0;
  for (int t = 0; t < trials; ++t) {
    SeededRng rng(SeededRng::Derive(seed, {static_cast<uint64_t>(t)}));
    auto perturbed = ApplyPpm(*stream_, index_, allocations, rng);
    if (!perturbed.ok()) return perturbed.status();
    const PatternStream reported = target_detector_.Run(perturbed->reported);
    auto counts = Confusion(ground_, reported, target_ids_);
    if (!counts.ok()) return counts.status();
    auto q = Quality(*counts, alpha_);
    if (!q.ok()) return q.status();
    sum_q += *q;
    sum_q2 += *q * *q;
    sum_prec += Precision(*counts);
    sum_rec += Recall(*counts);
  }
  QualityEstimate est;
  est.q_mean = sum_q / trials;
  est.prec = sum_prec / trials;
  est.rec = sum_rec / trials;
  if (trials > 1) {
    const double var =
        std::max(0.0, (sum_q2 - trials * est.q_mean * est.q_mean) / (trials - 1));
    est.q_stderr = std::sqrt(var / trials);
  }
  return est;
}

absl::StatusOr<QualityEstimate> EstimateQuality(
    const EventStream& historical, std::span<const PatternQuery> queries,
    const std::map<std::string, BudgetAllocation>& allocations,
    const OptimizerConfig& cfg) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  auto est = QualityEstimator::Create(historical, queries, cfg.alpha);
  if (!est.ok()) return est.status();
  return (*est)->Estimate(allocations, cfg.trials, cfg.seed);
}

absl::StatusOr<OptimizeResult> OptimizeAllocation(
    const std::string& query_id, size_t m, double eps_total,
    const OptimizerConfig& cfg, const QualityObjective& objective) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  auto initial = UniformAllocate(query_id, eps_total, m);
  if (!initial.ok()) return initial.status();

  OptimizeResult result;
  result.allocation = *std::move(initial);
  auto q0 = objective(result.allocation);
  if (!q0.ok()) return q0.status();
  result.quality = *q0;
  result.trace.push_back({0, -1, true, q0->q_mean, q0->q_stderr, false,
                          result.allocation.per_element});

  const double delta = cfg.delta_eps.value_or(m * eps_total / 100.0);
  // Nothing to redistribute.
  if (m == 1 || eps_total == 0 || delta <= 0) return result;

  const double compensation = cfg.conserve_mode == ConserveMode::kConserving
                                  ? delta / static_cast<double>(m - 1)
                                  : delta / static_cast<double>(m);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    result.iterations = iter;
    int best_i = -1;
    QualityEstimate best_q;
    BudgetAllocation best_alloc;
    for (size_t i = 0; i < m; ++i) {
      std::vector<double> eps = result.allocation.per_element;
      eps[i] += delta;
      bool feasible = true;
      for (size_t j = 0; j < m; ++j) {
        if (j != i) eps[j] -= compensation;
        if (eps[j] < -kBoundSlack || eps[j] > eps_total + kBoundSlack) {
          feasible = false;
        }
        eps[j] = std::clamp(eps[j], 0.0, eps_total);
      }
      TraceEntry entry{iter, static_cast<int>(i), feasible, 0, 0, false, eps};
      if (!feasible) {
        result.trace.push_back(std::move(entry));
        continue;
      }
      auto probe = MakeAllocation(query_id, eps);
      if (!probe.ok()) return probe.status();
      if (cfg.conserve_mode == ConserveMode::kConserving) {
        probe->epsilon_total = eps_total;
      }
      auto q = objective(*probe);
      if (!q.ok()) return q.status();
      entry.q = q->q_mean;
      entry.q_stderr = q->q_stderr;
      result.trace.push_back(std::move(entry));
      if (best_i < 0 || q->q_mean > best_q.q_mean) {
        best_i = static_cast<int>(i);
        best_q = *q;
        best_alloc = *std::move(probe);
      }
    }
    if (best_i < 0 || !(best_q.q_mean > result.quality.q_mean + cfg.improve_tol)) {
      break;
    }
    result.allocation = std::move(best_alloc);
    result.quality = best_q;
    // Mark the committed probe of this iteration.
    for (auto it = result.trace.rbegin(); it != result.trace.rend(); ++it) {
      if (it->iteration == iter && it->probe == best_i) {
        it->committed = true;
        break;
      }
    }
  }
  return result;
}

absl::StatusOr<OptimizeResult> Optimize(
    const EventStream& historical, const PatternQuery& private_query,
    std::span<const PatternQuery> target_queries, double eps_total,
    const OptimizerConfig& cfg) {
  if (auto s = private_query.Validate(); !s.ok()) return s;
  if (!(eps_total >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("total budget must be non-negative, got %g", eps_total));
  }
  std::vector<PatternQuery> queries;
  queries.push_back(private_query);
  queries.back().role = PrivacyRole::kPrivate;
  for (const PatternQuery& t : target_queries) {
    queries.push_back(t);
    queries.back().role = PrivacyRole::kTarget;
  }
  auto estimator = QualityEstimator::Create(historical, queries, cfg.alpha);
  if (!estimator.ok()) return estimator.status();
  const QualityEstimator& est = **estimator;
  return OptimizeAllocation(
      private_query.id, private_query.size(), eps_total, cfg,
      [&](const BudgetAllocation& alloc) -> absl::StatusOr<QualityEstimate> {
        return est.Estimate({{alloc.query_id, alloc}}, cfg.trials, cfg.seed);
      });
}

}  // namespace pattern_dp
