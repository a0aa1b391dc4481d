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

#include "pattern_dp/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "absl/strings/str_format.h"
#include "pattern_dp/baselines.h"
#include "pattern_dp/detector.h"
#include "pattern_dp/ppm_core.h"
#include "pattern_dp/rng.h"

namespace pattern_dp {
namespace {

constexpr uint64_t kAdaptiveSeedTag = 0xada97;

void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  const size_t workers =
      std::min<size_t>(n, static_cast<size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

// What every trial of one (mechanism, eps) cell shares.
struct CellSetup {
  absl::Status status;
  std::map<std::string, BudgetAllocation> allocations;
  std::vector<double> flip_probs;
};

BaselineMechanism ToBaseline(Mechanism m) {
  switch (m) {
    case Mechanism::kBa:
      return BaselineMechanism::kBudgetAbsorption;
    case Mechanism::kLandmark:
      return BaselineMechanism::kLandmark;
    default:
      return BaselineMechanism::kBudgetDivision;
  }
}

bool IsPatternLevel(Mechanism m) {
  return m == Mechanism::kUniform || m == Mechanism::kAdaptive;
}

}  // namespace

std::string MechanismId(Mechanism m) {
  switch (m) {
    case Mechanism::kUniform:
      return "uniform";
    case Mechanism::kAdaptive:
      return "adaptive";
    case Mechanism::kBd:
      return "bd";
    case Mechanism::kBa:
      return "ba";
    case Mechanism::kLandmark:
      return "landmark";
  }
  return "unknown";
}

absl::StatusOr<Mechanism> ParseMechanism(const std::string& name) {
  for (Mechanism m : {Mechanism::kUniform, Mechanism::kAdaptive, Mechanism::kBd,
                      Mechanism::kBa, Mechanism::kLandmark}) {
    if (MechanismId(m) == name) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown mechanism '%s'", name));
}

absl::Status ExperimentPlan::Validate() const {
  if (mechanisms.empty()) {
    return absl::InvalidArgumentError("plan lists no mechanisms");
  }
  if (eps_grid.empty()) return absl::InvalidArgumentError("empty eps grid");
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] >= 0) || !std::isfinite(eps_grid[i])) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "eps grid values must be finite and non-negative, got %g",
          eps_grid[i]));
    }
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1])) {
      return absl::InvalidArgumentError("eps grid must be strictly ascending");
    }
  }
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (!(alpha >= 0 && alpha <= 1)) {
    return absl::InvalidArgumentError("alpha must be in [0, 1]");
  }
  if (baseline_w < 1 || slot_ticks < 1) {
    return absl::InvalidArgumentError("baseline w and slot_ticks must be >= 1");
  }
  return optimizer.Validate();
}

size_t ExperimentResult::failed_rows() const {
  return std::count_if(rows.begin(), rows.end(),
                       [](const ResultRow& r) { return r.failed; });
}

absl::StatusOr<ExperimentResult> RunExperiment(const Dataset& data,
                                               const ExperimentPlan& plan) {
  if (auto s = plan.Validate(); !s.ok()) return s;
  for (const PatternQuery& q : data.queries) {
    if (auto s = q.Validate(); !s.ok()) return s;
  }
  const EventStream& stream = data.events;
  const std::vector<PatternQuery> privates =
      QueriesWithRole(data.queries, PrivacyRole::kPrivate);
  const std::vector<PatternQuery> targets =
      QueriesWithRole(data.queries, PrivacyRole::kTarget);
  std::vector<std::string> target_ids;
  for (const PatternQuery& q : targets) target_ids.push_back(q.id);

  const PrivateEventIndex index =
      BuildPrivateEventIndex(Detect(stream, data.queries), data.queries);
  const Detector target_detector(stream, targets);
  const PatternStream ground = target_detector.Run();

  ExperimentResult result;
  {
    auto counts = Confusion(ground, ground, target_ids);
    if (!counts.ok()) return counts.status();
    auto q_ord = Quality(*counts, plan.alpha);
    if (!q_ord.ok()) return q_ord.status();
    result.q_ord = *q_ord;
  }

  const size_t n_mech = plan.mechanisms.size();
  const size_t n_eps = plan.eps_grid.size();

  // Adaptive allocations: one optimization per (eps, private pattern).
  std::vector<absl::StatusOr<OptimizeResult>> optimized(
      n_eps * privates.size(), absl::UnknownError("not run"));
  if (std::find(plan.mechanisms.begin(), plan.mechanisms.end(),
                Mechanism::kAdaptive) != plan.mechanisms.end()) {
    ParallelFor(optimized.size(), plan.jobs, [&](size_t task) {
      const size_t e = task / privates.size();
      const size_t j = task % privates.size();
      OptimizerConfig cfg = plan.optimizer;
      cfg.alpha = plan.alpha;
      cfg.seed = SeededRng::Derive(plan.seed, {kAdaptiveSeedTag, e, j});
      optimized[task] =
          Optimize(stream, privates[j], targets, plan.eps_grid[e], cfg);
    });
  }

  std::vector<CellSetup> setups(n_mech * n_eps);
  for (size_t mi = 0; mi < n_mech; ++mi) {
    const Mechanism mech = plan.mechanisms[mi];
    for (size_t e = 0; e < n_eps; ++e) {
      CellSetup& setup = setups[mi * n_eps + e];
      const double eps = plan.eps_grid[e];
      if (mech == Mechanism::kUniform) {
        for (const PatternQuery& q : privates) {
          auto alloc = UniformAllocate(q.id, eps, q.size());
          if (!alloc.ok()) {
            setup.status = alloc.status();
            break;
          }
          setup.allocations[q.id] = *std::move(alloc);
        }
      } else if (mech == Mechanism::kAdaptive) {
        for (size_t j = 0; j < privates.size(); ++j) {
          const auto& opt = optimized[e * privates.size() + j];
          if (!opt.ok()) {
            setup.status = opt.status();
            break;
          }
          setup.allocations[privates[j].id] = opt->allocation;
          result.adaptive_allocations[eps].push_back(opt->allocation);
        }
      } else {
        BaselineConfig cfg;
        cfg.mechanism = ToBaseline(mech);
        cfg.w = plan.baseline_w;
        cfg.slot_ticks = plan.slot_ticks;
        if (cfg.mechanism == BaselineMechanism::kLandmark) {
          cfg.landmark_set =
              LandmarksFromInstances(index.instances, plan.slot_ticks);
        }
        if (eps == 0) {
          cfg.eps_native = 0;
        } else {
          auto calibrated = Calibrate(cfg, stream, index.instances, eps);
          if (!calibrated.ok()) {
            setup.status = calibrated.status();
            continue;
          }
          cfg = *std::move(calibrated);
        }
        auto alloc = AllocateBaseline(stream, cfg);
        if (!alloc.ok()) {
          setup.status = alloc.status();
          continue;
        }
        auto probs = FlipProbabilities(alloc->per_event);
        if (!probs.ok()) {
          setup.status = probs.status();
          continue;
        }
        setup.flip_probs = *std::move(probs);
      }
    }
  }

  const size_t n_trials = static_cast<size_t>(plan.trials);
  result.rows.resize(n_mech * n_eps * n_trials);
  ParallelFor(result.rows.size(), plan.jobs, [&](size_t cell) {
    const size_t t = cell % n_trials;
    const size_t e = (cell / n_trials) % n_eps;
    const size_t mi = cell / (n_trials * n_eps);
    const Mechanism mech = plan.mechanisms[mi];
    ResultRow& row = result.rows[cell];
    row.mechanism = mech;
    row.eps = plan.eps_grid[e];
    row.trial = static_cast<int>(t);
    const CellSetup& setup = setups[mi * n_eps + e];
    auto fail = [&row](const absl::Status& s) {
      row.failed = true;
      row.error = std::string(s.message());
      row.prec = row.rec = row.q = row.mre = std::nan("");
    };
    if (!setup.status.ok()) {
      fail(setup.status);
      return;
    }
    SeededRng rng(SeededRng::Derive(
        plan.seed, {static_cast<uint64_t>(mech) + 1, e, t}));
    std::vector<uint8_t> reported;
    if (IsPatternLevel(mech)) {
      auto perturbed = ApplyPpm(stream, index, setup.allocations, rng);
      if (!perturbed.ok()) {
        fail(perturbed.status());
        return;
      }
      reported = std::move(perturbed->reported);
    } else {
      reported = PerturbAllEvents(setup.flip_probs, rng).reported;
    }
    auto counts = Confusion(ground, target_detector.Run(reported), target_ids);
    if (!counts.ok()) {
      fail(counts.status());
      return;
    }
    auto q = Quality(*counts, plan.alpha);
    if (!q.ok()) {
      fail(q.status());
      return;
    }
    row.counts = *counts;
    row.prec = Precision(*counts);
    row.rec = Recall(*counts);
    row.q = *q;
    row.mre = *Mre(result.q_ord, *q);
  });
  return result;
}

std::string ResultsToCsv(const std::vector<ResultRow>& rows) {
  std::string out = "mechanism,eps,trial,tp,fp,fn,prec,rec,q,mre\n";
  for (const ResultRow& r : rows) {
    out += absl::StrFormat("%s,%.10g,%d,%d,%d,%d,%.10g,%.10g,%.10g,%.10g\n",
                           MechanismId(r.mechanism), r.eps, r.trial,
                           r.counts.tp, r.counts.fp, r.counts.fn, r.prec, r.rec,
                           r.q, r.mre);
  }
  return out;
}

std::map<std::pair<Mechanism, double>, CellSummary> SummarizeMre(
    const std::vector<ResultRow>& rows) {
  std::map<std::pair<Mechanism, double>, std::vector<double>> values;
  for (const ResultRow& r : rows) {
    if (!r.failed) values[{r.mechanism, r.eps}].push_back(r.mre);
  }
  std::map<std::pair<Mechanism, double>, CellSummary> out;
  for (const auto& [key, v] : values) {
    CellSummary s;
    s.n = static_cast<int>(v.size());
    double sum = 0;
    for (double x : v) sum += x;
    s.mean_mre = sum / s.n;
    if (s.n > 1) {
      double ss = 0;
      for (double x : v) ss += (x - s.mean_mre) * (x - s.mean_mre);
      s.stderr_mre = std::sqrt(ss / (s.n - 1) / s.n);
    }
    out[key] = s;
  }
  return out;
}

}  // namespace pattern_dp
