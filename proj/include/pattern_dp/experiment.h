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

#ifndef PATTERN_DP_EXPERIMENT_H_
#define PATTERN_DP_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pattern_dp/adaptive.h"
#include "pattern_dp/eval.h"
#include "pattern_dp/matcher.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

enum class Mechanism { kUniform, kAdaptive, kBd, kBa, kLandmark };

std::string MechanismId(Mechanism m);
absl::StatusOr<Mechanism> ParseMechanism(const std::string& name);

struct Dataset {
  EventStream events;
  std::vector<PatternQuery> queries;
};

struct ExperimentPlan {
  std::vector<Mechanism> mechanisms;
  // Pattern-level budgets, ascending.
  std::vector<double> eps_grid = {0.1, 0.2, 0.5, 1, 2, 5, 10};
  int trials = 100;
  double alpha = kDefaultAlpha;
  uint64_t seed = 0;
  // Baseline timestamps are slots of slot_ticks ticks; w is in slots.
  int64_t baseline_w = 10;
  Tick slot_ticks = 1;
  // Used for the adaptive mechanism; alpha is taken from the plan and the seed
  // is derived per (eps, private pattern).
  OptimizerConfig optimizer;
  // Worker threads. Results do not depend on it.
  int jobs = 1;

  absl::Status Validate() const;
};

// One (mechanism, eps, trial) cell.
struct ResultRow {
  Mechanism mechanism = Mechanism::kUniform;
  double eps = 0;
  int trial = 0;
  ConfusionCounts counts;
  double prec = 0;
  double rec = 0;
  double q = 0;
  double mre = 0;
  bool failed = false;
  std::string error;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  // Quality of target detection without any mechanism.
  double q_ord = 0;
  // Allocation used by the adaptive mechanism at each grid point.
  std::map<double, std::vector<BudgetAllocation>> adaptive_allocations;
  size_t failed_rows() const;
};

// For each (mechanism, eps, trial): allocate or calibrate, perturb, detect the
// target patterns and score them against detection on the unperturbed stream.
// Each cell draws from its own seed derived from (seed, mechanism, eps index,
// trial). Fails only on invalid input; per-cell failures are marked in rows.
absl::StatusOr<ExperimentResult> RunExperiment(const Dataset& data,
                                               const ExperimentPlan& plan);

// Header: mechanism,eps,trial,tp,fp,fn,prec,rec,q,mre
std::string ResultsToCsv(const std::vector<ResultRow>& rows);

struct CellSummary {
  double mean_mre = 0;
  double stderr_mre = 0;
  int n = 0;
};

// Mean and standard error of MRE per (mechanism, eps), over non-failed rows.
std::map<std::pair<Mechanism, double>, CellSummary> SummarizeMre(
    const std::vector<ResultRow>& rows);

}  // namespace pattern_dp

#endif  // PATTERN_DP_EXPERIMENT_H_
