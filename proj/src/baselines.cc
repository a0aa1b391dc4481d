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

#include "pattern_dp/baselines.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace pattern_dp {
namespace {

constexpr int kMaxBisectionSteps = 200;
constexpr int kMaxBracketDoublings = 200;
constexpr double kCalibrationRelTol = 1e-10;

std::vector<double> BudgetDivision(int64_t slots, const BaselineConfig& cfg) {
  return std::vector<double>(slots, cfg.eps_native / cfg.w);
}

std::vector<double> BudgetAbsorption(const std::vector<uint8_t>& occupied,
                                     const BaselineConfig& cfg) {
  const int64_t slots = static_cast<int64_t>(occupied.size());
  const double unit = cfg.eps_native / cfg.w;
  std::vector<double> eps(slots, 0.0);
  // Relative slot of the last publication and how many slots it absorbed.
  int64_t last_pub = -cfg.w - 1;
  int64_t last_absorbed = 0;
  for (int64_t s = 0; s < slots; ++s) {
    if (s - last_pub <= last_absorbed) continue;  // nullified
    if (!occupied[s]) continue;                   // skipped, budget saved
    const int64_t from = std::max(
        {last_pub + last_absorbed + 1, s - cfg.w + 1, int64_t{0}});
    const int64_t absorbed = s - from;
    eps[s] = unit * static_cast<double>(1 + absorbed);
    last_pub = s;
    last_absorbed = absorbed;
  }
  return eps;
}

std::vector<double> Landmark(int64_t first, int64_t slots,
                             const BaselineConfig& cfg) {
  std::vector<double> eps(slots, 0.0);
  std::map<int64_t, int64_t> landmarks_per_block;
  for (int64_t l : cfg.landmark_set) {
    landmarks_per_block[WindowIndex(l, cfg.w)]++;
  }
  for (int64_t s = 0; s < slots; ++s) {
    const int64_t block = WindowIndex(first + s, cfg.w);
    auto it = landmarks_per_block.find(block);
    const int64_t l = it == landmarks_per_block.end() ? 0 : it->second;
    if (l >= cfg.w) {
      eps[s] = cfg.eps_native / static_cast<double>(l);
    } else {
      eps[s] = cfg.eps_native / static_cast<double>(l + 1);
    }
  }
  return eps;
}

}  // namespace

std::string MechanismName(BaselineMechanism m) {
  switch (m) {
    case BaselineMechanism::kBudgetDivision:
      return "bd";
    case BaselineMechanism::kBudgetAbsorption:
      return "ba";
    case BaselineMechanism::kLandmark:
      return "landmark";
  }
  return "unknown";
}

absl::Status BaselineConfig::Validate() const {
  if (w < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("window length w must be >= 1, got %d", w));
  }
  if (slot_ticks < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("slot_ticks must be >= 1, got %d", slot_ticks));
  }
  if (!(eps_native >= 0) || !std::isfinite(eps_native)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "native budget must be finite and non-negative, got %g", eps_native));
  }
  return absl::OkStatus();
}

int64_t SlotOf(Tick t, Tick slot_ticks) { return WindowIndex(t, slot_ticks); }

absl::StatusOr<BaselineAllocation> AllocateBaseline(const EventStream& stream,
                                                    const BaselineConfig& cfg) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  BaselineAllocation out;
  if (stream.empty()) return out;
  const int64_t first = SlotOf(stream[0].timestamp, cfg.slot_ticks);
  const int64_t last = SlotOf(stream[stream.size() - 1].timestamp, cfg.slot_ticks);
  const int64_t slots = last - first + 1;
  std::vector<uint8_t> occupied(slots, 0);
  for (const Event& e : stream.events()) {
    occupied[SlotOf(e.timestamp, cfg.slot_ticks) - first] = 1;
  }

  std::vector<double> eps;
  switch (cfg.mechanism) {
    case BaselineMechanism::kBudgetDivision:
      eps = BudgetDivision(slots, cfg);
      break;
    case BaselineMechanism::kBudgetAbsorption:
      eps = BudgetAbsorption(occupied, cfg);
      break;
    case BaselineMechanism::kLandmark:
      eps = Landmark(first, slots, cfg);
      break;
  }
  for (int64_t s = 0; s < slots; ++s) out.per_timestamp[first + s] = eps[s];
  out.per_event.reserve(stream.size());
  for (const Event& e : stream.events()) {
    out.per_event.push_back(eps[SlotOf(e.timestamp, cfg.slot_ticks) - first]);
  }
  return out;
}

double PatternLevelEpsilonOf(
    std::span<const double> per_event,
    std::span<const PatternInstance> private_instances) {
  double worst = 0;
  for (const PatternInstance& inst : private_instances) {
    double sum = 0;
    for (size_t pos : inst.positions) sum += per_event[pos];
    worst = std::max(worst, sum);
  }
  return worst;
}

std::set<int64_t> LandmarksFromInstances(
    std::span<const PatternInstance> private_instances, Tick slot_ticks) {
  std::set<int64_t> out;
  for (const PatternInstance& inst : private_instances) {
    for (const Event& e : inst.events) out.insert(SlotOf(e.timestamp, slot_ticks));
  }
  return out;
}

absl::StatusOr<BaselineConfig> Calibrate(
    BaselineConfig cfg, const EventStream& stream,
    std::span<const PatternInstance> private_instances, double eps_target) {
  if (!(eps_target > 0) || !std::isfinite(eps_target)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "calibration target must be positive and finite, got %g", eps_target));
  }
  auto aggregate = [&](double native) -> absl::StatusOr<double> {
    BaselineConfig c = cfg;
    c.eps_native = native;
    auto alloc = AllocateBaseline(stream, c);
    if (!alloc.ok()) return alloc.status();
    return PatternLevelEpsilonOf(alloc->per_event, private_instances);
  };

  double lo = 0, hi = std::max(1.0, eps_target);
  auto f_lo = aggregate(lo);
  if (!f_lo.ok()) return f_lo.status();
  auto f_hi = aggregate(hi);
  if (!f_hi.ok()) return f_hi.status();
  for (int i = 0; i < kMaxBracketDoublings && *f_hi < eps_target; ++i) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2;
    f_hi = aggregate(hi);
    if (!f_hi.ok()) return f_hi.status();
  }
  if (!(*f_lo <= eps_target && eps_target <= *f_hi)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "%s: cannot bracket pattern-level budget %g (aggregate ranges over "
        "[%g, %g]); are there private instances?",
        MechanismName(cfg.mechanism), eps_target, *f_lo, *f_hi));
  }

  double mid = hi;
  for (int i = 0; i < kMaxBisectionSteps; ++i) {
    mid = 0.5 * (lo + hi);
    auto f_mid = aggregate(mid);
    if (!f_mid.ok()) return f_mid.status();
    if (*f_mid < *f_lo || *f_mid > *f_hi) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "%s: aggregated budget is not monotone in the native budget",
          MechanismName(cfg.mechanism)));
    }
    if (std::abs(*f_mid - eps_target) <= kCalibrationRelTol * eps_target) break;
    if (*f_mid < eps_target) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  cfg.eps_native = mid;
  return cfg;
}

absl::StatusOr<std::vector<double>> FlipProbabilities(
    std::span<const double> per_event) {
  std::vector<double> probs;
  probs.reserve(per_event.size());
  for (double eps : per_event) {
    auto p = EpsilonToP(eps);
    if (!p.ok()) return p.status();
    probs.push_back(*p);
  }
  return probs;
}

PerturbationResult PerturbAllEvents(std::span<const double> flip_probs,
                                    SeededRng& rng) {
  PerturbationResult out;
  out.reported.resize(flip_probs.size());
  out.responses.reserve(flip_probs.size());
  for (size_t pos = 0; pos < flip_probs.size(); ++pos) {
    BinaryResponse r;
    r.instance = pos;
    r.element = 0;
    r.position = pos;
    r.input_bit = 1;
    r.output_bit = Randomize(1, flip_probs[pos], rng);
    r.flipped = r.output_bit != r.input_bit;
    out.reported[pos] = r.output_bit;
    out.responses.push_back(r);
  }
  return out;
}

}  // namespace pattern_dp
