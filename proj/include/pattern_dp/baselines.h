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

// Stream-level baselines with binary answers.
//
// The budget shapes of w-event budget division (BD), w-event budget absorption
// (BA) and uniform landmark privacy are reproduced over discrete baseline
// timestamps (slots of `slot_ticks` ticks). Every event in the stream gets the
// budget of its slot and is reported through the same randomized response as
// the pattern-level mechanisms, so differences in utility come only from
// where the budget goes.

#ifndef PATTERN_DP_BASELINES_H_
#define PATTERN_DP_BASELINES_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pattern_dp/matcher.h"
#include "pattern_dp/ppm_core.h"
#include "pattern_dp/rng.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

enum class BaselineMechanism {
  kBudgetDivision,
  kBudgetAbsorption,
  kLandmark,
};

std::string MechanismName(BaselineMechanism m);

struct BaselineConfig {
  BaselineMechanism mechanism = BaselineMechanism::kBudgetDivision;
  // Window length in slots. BD and BA spend at most eps_native in any w
  // consecutive slots; the landmark split is done per block of w slots.
  int64_t w = 1;
  Tick slot_ticks = 1;
  // Landmark slots (LANDMARK only).
  std::set<int64_t> landmark_set;
  double eps_native = 1.0;

  absl::Status Validate() const;
};

struct BaselineAllocation {
  // Budget per stream position.
  std::vector<double> per_event;
  // Budget per slot over [first slot, last slot] of the stream.
  std::map<int64_t, double> per_timestamp;
};

int64_t SlotOf(Tick t, Tick slot_ticks);

// BD: eps_native / w to every slot.
// BA: each published slot gets eps_native / w plus the unused budget of the
//     skipped slots before it (at most w - 1 of them, none already nullified);
//     the same number of slots after it are then nullified. A slot is skipped
//     when it holds no events; with no skipped slots BA equals BD.
// LANDMARK: in each block of w slots with L landmarks, every slot gets
//     eps_native / (L + 1), so all landmarks plus any single regular slot
//     stay within eps_native. A block made only of landmarks gives each
//     eps_native / L.
absl::StatusOr<BaselineAllocation> AllocateBaseline(const EventStream& stream,
                                                    const BaselineConfig& cfg);

// Worst-case pattern-level budget: max over instances of the sum of their
// elements' budgets. 0 without instances.
double PatternLevelEpsilonOf(std::span<const double> per_event,
                             std::span<const PatternInstance> private_instances);

// Slots holding at least one element of a private instance.
std::set<int64_t> LandmarksFromInstances(
    std::span<const PatternInstance> private_instances, Tick slot_ticks);

// Rescales eps_native by bisection so that the pattern-level budget of the
// allocation equals eps_target (to 1e-9 relative).
absl::StatusOr<BaselineConfig> Calibrate(
    BaselineConfig cfg, const EventStream& stream,
    std::span<const PatternInstance> private_instances, double eps_target);

absl::StatusOr<std::vector<double>> FlipProbabilities(
    std::span<const double> per_event);

// Randomized response on every event of the stream; one draw per event in
// stream order.
PerturbationResult PerturbAllEvents(std::span<const double> flip_probs,
                                    SeededRng& rng);

}  // namespace pattern_dp

#endif  // PATTERN_DP_BASELINES_H_
