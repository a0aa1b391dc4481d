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

// File formats.
//
//   events      JSONL, one {"stream_id", "timestamp", "kind", "payload"?} per
//               line, in stream order.
//   queries     JSON array of {"id", "elements", "mode", "window",
//               "privacy_role", "partition"?}. An element is a kind, or an
//               object {"kinds": [...], "cells": [...]?}.
//   responses   JSONL {"instance_id", "element_index", "input_bit",
//               "output_bit"}.
//   trace       JSONL {"iteration", "probe", "feasible", "q", "q_stderr",
//               "committed", "eps"}.
//   baseline    JSONL {"timestamp", "eps"}.

#ifndef PATTERN_DP_IO_H_
#define PATTERN_DP_IO_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "pattern_dp/adaptive.h"
#include "pattern_dp/baselines.h"
#include "pattern_dp/datasets.h"
#include "pattern_dp/matcher.h"
#include "pattern_dp/ppm_core.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

void WriteEventsJsonl(const EventStream& stream, std::ostream& out);
// seq_no is reassigned 1..n in file order.
absl::StatusOr<EventStream> ReadEventsJsonl(std::istream& in);

nlohmann::json QueriesToJson(std::span<const PatternQuery> queries);
absl::StatusOr<std::vector<PatternQuery>> QueriesFromJson(
    const nlohmann::json& j);

nlohmann::json AllocationToJson(const BudgetAllocation& alloc);

void WriteResponsesJsonl(std::span<const BinaryResponse> responses,
                         std::ostream& out);
void WriteTraceJsonl(std::span<const TraceEntry> trace, std::ostream& out);
void WriteBaselineJsonl(const BaselineAllocation& alloc, std::ostream& out);

nlohmann::json AreasToJson(const AreaAssignment& areas);

// Whole-file helpers.
absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);
absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents);

// Hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

}  // namespace pattern_dp

#endif  // PATTERN_DP_IO_H_
