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

#include "pattern_dp/ppm_core.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_format.h"

namespace pattern_dp {
namespace {

constexpr double kSumTolerance = 1e-9;

}  // namespace

absl::StatusOr<double> EpsilonToP(double eps) {
  if (!std::isfinite(eps)) {
    return absl::InvalidArgumentError("privacy budget must be finite");
  }
  if (eps < 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "privacy budget must be non-negative, got %g (flip probability would "
        "exceed 1/2)",
        eps));
  }
  if (eps == 0) return 0.5;
  return 1.0 / (1.0 + std::exp(eps));
}

absl::StatusOr<double> PToEpsilon(double p) {
  if (!(p > 0.0 && p <= 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("flip probability must be in (0, 1/2], got %g", p));
  }
  if (p == 0.5) return 0.0;
  return std::log1p(-p) - std::log(p);
}

absl::Status BudgetAllocation::Validate() const {
  if (per_element.empty()) {
    return absl::InvalidArgumentError("allocation has no elements");
  }
  if (probs.size() != per_element.size()) {
    return absl::InvalidArgumentError(
        "allocation has mismatched budget and probability vectors");
  }
  double sum = 0;
  for (size_t i = 0; i < per_element.size(); ++i) {
    if (per_element[i] < 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "element %d has negative budget %g", i, per_element[i]));
    }
    if (!(probs[i] > 0 && probs[i] <= 0.5)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "element %d has flip probability %g outside (0, 1/2]", i, probs[i]));
    }
    auto eps = PToEpsilon(probs[i]);
    if (!eps.ok() || std::abs(*eps - per_element[i]) > kSumTolerance) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "element %d: budget %g does not match flip probability %g", i,
          per_element[i], probs[i]));
    }
    sum += per_element[i];
  }
  if (std::abs(sum - epsilon_total) > kSumTolerance) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "element budgets sum to %.12g, expected %.12g", sum, epsilon_total));
  }
  return absl::OkStatus();
}

absl::StatusOr<BudgetAllocation> MakeAllocation(
    std::string query_id, std::vector<double> per_element) {
  if (per_element.empty()) {
    return absl::InvalidArgumentError("allocation needs at least one element");
  }
  BudgetAllocation alloc;
  alloc.query_id = std::move(query_id);
  alloc.probs.reserve(per_element.size());
  for (double eps : per_element) {
    auto p = EpsilonToP(eps);
    if (!p.ok()) return p.status();
    alloc.probs.push_back(*p);
  }
  alloc.epsilon_total =
      std::accumulate(per_element.begin(), per_element.end(), 0.0);
  alloc.per_element = std::move(per_element);
  return alloc;
}

absl::StatusOr<BudgetAllocation> UniformAllocate(std::string query_id,
                                                 double eps_total, size_t m) {
  if (m == 0) {
    return absl::InvalidArgumentError("cannot allocate over zero elements");
  }
  if (!(eps_total >= 0) || !std::isfinite(eps_total)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "total budget must be finite and non-negative, got %g", eps_total));
  }
  auto alloc = MakeAllocation(std::move(query_id),
                              std::vector<double>(m, eps_total / m));
  if (!alloc.ok()) return alloc.status();
  alloc->epsilon_total = eps_total;
  return alloc;
}

double ComposedEpsilon(const BudgetAllocation& alloc) {
  double total = 0;
  for (double p : alloc.probs) {
    total += std::log1p(-p) - std::log(p);
  }
  return total;
}

uint8_t Randomize(uint8_t input_bit, double p, SeededRng& rng) {
  const bool flip = rng.Uniform() < p;
  return flip ? static_cast<uint8_t>(input_bit ^ 1u) : input_bit;
}

absl::StatusOr<PerturbationResult> ApplyPpm(
    const EventStream& stream, const PrivateEventIndex& index,
    const std::map<std::string, BudgetAllocation>& allocations,
    SeededRng& rng) {
  PerturbationResult result;
  result.reported.assign(stream.size(), 1);
  size_t total = 0;
  for (const PatternInstance& inst : index.instances) total += inst.positions.size();
  result.responses.reserve(total);

  for (size_t i = 0; i < index.instances.size(); ++i) {
    const PatternInstance& inst = index.instances[i];
    auto it = allocations.find(inst.query_id);
    if (it == allocations.end()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "no allocation for private pattern %s", inst.query_id));
    }
    const BudgetAllocation& alloc = it->second;
    if (alloc.size() != inst.positions.size()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "allocation for %s has %d elements, pattern has %d", inst.query_id,
          alloc.size(), inst.positions.size()));
    }
    for (size_t k = 0; k < inst.positions.size(); ++k) {
      const size_t pos = inst.positions[k];
      if (pos >= stream.size()) {
        return absl::InvalidArgumentError(
            "private index does not belong to this stream");
      }
      BinaryResponse r;
      r.instance = i;
      r.element = k;
      r.position = pos;
      r.input_bit = 1;
      r.output_bit = Randomize(r.input_bit, alloc.probs[k], rng);
      r.flipped = r.output_bit != r.input_bit;
      result.reported[pos] &= r.output_bit;
      result.responses.push_back(r);
    }
  }
  return result;
}

absl::StatusOr<double> VerifyPatternLevelDp(const PatternQuery& query,
                                            const BudgetAllocation& alloc,
                                            const NeighborPair& pair) {
  const size_t m = query.size();
  if (m == 0 || m > kMaxVerifiedElements) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "exact verification supports 1..%d elements, pattern has %d",
        kMaxVerifiedElements, m));
  }
  if (alloc.size() != m) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "allocation has %d elements, pattern has %d", alloc.size(), m));
  }
  if (pair.original.size() != pair.neighbor.size()) {
    return absl::InvalidArgumentError(
        "not pattern-level neighbors: the pattern streams have different "
        "numbers of instances");
  }

  const ScenarioInstance* differing_a = nullptr;
  const ScenarioInstance* differing_b = nullptr;
  size_t differing = 0;
  for (size_t j = 0; j < pair.original.size(); ++j) {
    const ScenarioInstance& a = pair.original[j];
    const ScenarioInstance& b = pair.neighbor[j];
    if (a.query_id != b.query_id) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "not pattern-level neighbors: instance %d has pattern type %s in one "
          "stream and %s in the other",
          j, a.query_id, b.query_id));
    }
    if (a.query_id != query.id) {
      if (a.existence != b.existence) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "not pattern-level neighbors: instance %d of type %s differs, but "
            "only instances of %s may differ",
            j, a.query_id, query.id));
      }
      continue;
    }
    if (a.existence.size() != m || b.existence.size() != m) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "not in-pattern neighbors: instance %d must have %d elements in "
          "both streams",
          j, m));
    }
    if (a.existence != b.existence) {
      ++differing;
      differing_a = &a;
      differing_b = &b;
    }
  }
  if (differing != 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "not pattern-level neighbors: exactly one instance of %s must differ, "
        "found %d",
        query.id, differing));
  }
  size_t differing_elements = 0;
  for (size_t k = 0; k < m; ++k) {
    if ((differing_a->existence[k] != 0) != (differing_b->existence[k] != 0)) {
      ++differing_elements;
    }
  }
  if (differing_elements != 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "not in-pattern neighbors: the differing instance must differ in "
        "exactly one element, found %d",
        differing_elements));
  }

  std::vector<double> log_keep(m), log_flip(m);
  for (size_t k = 0; k < m; ++k) {
    log_keep[k] = std::log1p(-alloc.probs[k]);
    log_flip[k] = std::log(alloc.probs[k]);
  }
  double worst = 0;
  for (uint32_t r = 0; r < (1u << m); ++r) {
    double log_a = 0, log_b = 0;
    for (size_t k = 0; k < m; ++k) {
      const bool bit = (r >> k) & 1u;
      log_a += (bit == (differing_a->existence[k] != 0)) ? log_keep[k]
                                                          : log_flip[k];
      log_b += (bit == (differing_b->existence[k] != 0)) ? log_keep[k]
                                                          : log_flip[k];
    }
    worst = std::max(worst, std::abs(log_a - log_b));
  }
  return worst;
}

}  // namespace pattern_dp
