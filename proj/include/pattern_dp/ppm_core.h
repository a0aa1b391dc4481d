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

// Randomized response over the events of private pattern instances.
//
// Each element e_i of a private instance is reported through a binary
// randomized response that keeps its existence bit with probability 1 - p_i
// and flips it with probability p_i, where the element's budget is
// eps_i = ln((1 - p_i) / p_i). Budgets of the elements of one instance add up,
// so an allocation (eps_1, ..., eps_m) protects the pattern type with
// eps_1 + ... + eps_m.

#ifndef PATTERN_DP_PPM_CORE_H_
#define PATTERN_DP_PPM_CORE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pattern_dp/matcher.h"
#include "pattern_dp/rng.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

// p = 1 / (1 + e^eps). eps must be finite and >= 0; negative budgets would
// mean p > 1/2 and are rejected rather than clamped.
absl::StatusOr<double> EpsilonToP(double eps);

// eps = ln((1 - p) / p) for p in (0, 1/2].
absl::StatusOr<double> PToEpsilon(double p);

struct BudgetAllocation {
  std::string query_id;
  double epsilon_total = 0.0;
  std::vector<double> per_element;
  std::vector<double> probs;

  size_t size() const { return per_element.size(); }

  // Checks the sum, range and round-trip invariants.
  absl::Status Validate() const;
};

// Builds an allocation from per-element budgets; epsilon_total is their sum.
absl::StatusOr<BudgetAllocation> MakeAllocation(std::string query_id,
                                                std::vector<double> per_element);

// eps_total / m to every element.
absl::StatusOr<BudgetAllocation> UniformAllocate(std::string query_id,
                                                 double eps_total, size_t m);

// Sum of ln((1 - p_j) / p_j) over the allocation's elements.
double ComposedEpsilon(const BudgetAllocation& alloc);

// Keeps `input_bit` with probability 1 - p, flips it with probability p.
// Consumes exactly one uniform draw.
uint8_t Randomize(uint8_t input_bit, double p, SeededRng& rng);

struct BinaryResponse {
  size_t instance = 0;  // index into PrivateEventIndex::instances
  size_t element = 0;
  size_t position = 0;  // stream position of the event
  uint8_t input_bit = 1;
  uint8_t output_bit = 1;
  bool flipped = false;
};

struct PerturbationResult {
  // Reported existence bit per stream position. An event in several private
  // instances is reported present only if every one of its responses says
  // present.
  std::vector<uint8_t> reported;
  // One entry per (private instance, element), in instance then element order.
  std::vector<BinaryResponse> responses;
};

// Perturbs the elements of every private instance in `index` with that
// instance's allocation (looked up by query id). Events outside private
// instances are reported unperturbed. Draws are consumed in instance order,
// then element order.
absl::StatusOr<PerturbationResult> ApplyPpm(
    const EventStream& stream, const PrivateEventIndex& index,
    const std::map<std::string, BudgetAllocation>& allocations,
    SeededRng& rng);

// Existence bits of one pattern instance in a verification scenario.
struct ScenarioInstance {
  std::string query_id;
  std::vector<uint8_t> existence;
};

// Two pattern streams claimed to be pattern-level neighbors.
struct NeighborPair {
  std::vector<ScenarioInstance> original;
  std::vector<ScenarioInstance> neighbor;
};

inline constexpr size_t kMaxVerifiedElements = 12;

// Exact privacy loss of randomized response on a pair of pattern-level
// neighbors: enumerates all 2^m response vectors of the differing instance and
// returns the largest |ln(Pr[R | original] / Pr[R | neighbor])|. Instances
// that are equal in both streams contribute identical factors and cancel.
//
// Rejects pairs that are not neighbors w.r.t. `query` with a message naming
// the violated condition.
absl::StatusOr<double> VerifyPatternLevelDp(const PatternQuery& query,
                                            const BudgetAllocation& alloc,
                                            const NeighborPair& pair);

}  // namespace pattern_dp

#endif  // PATTERN_DP_PPM_CORE_H_
