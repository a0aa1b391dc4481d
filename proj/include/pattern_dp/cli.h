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

// Command-line front end.
//
//   pattern_dp synth       --seed S --out DIR [--windows N]
//   pattern_dp taxi-sample --seed S --out DIR [--taxis N]
//   pattern_dp ingest      --tdrive-dir DIR --cell-size M --seed S --out DIR
//   pattern_dp allocate    --dataset DIR --private-query ID --eps E
//                          --mode uniform|adaptive [--seed S] [--out FILE]
//   pattern_dp run         --plan FILE --out DIR [--jobs N]
//
// A dataset directory holds events.jsonl and queries.json. Every command that
// writes a directory also writes manifest.json with the resolved
// configuration, seeds, tool version and SHA-256 of the dataset and outputs.

#ifndef PATTERN_DP_CLI_H_
#define PATTERN_DP_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "pattern_dp/experiment.h"

namespace pattern_dp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Reads events.jsonl and queries.json from a dataset directory.
absl::StatusOr<Dataset> LoadDataset(const std::filesystem::path& dir);

// Writes events.jsonl and queries.json; returns the dataset fingerprint.
absl::StatusOr<std::string> SaveDataset(const Dataset& data,
                                        const std::filesystem::path& dir);

// SHA-256 over the serialized events followed by the serialized queries.
std::string DatasetFingerprint(const Dataset& data);

// Plan files. "dataset" is a directory (relative paths resolve against
// `plan_dir`) or {"generate": "synthetic" | "taxi_sample", ...}.
struct PlanFile {
  ExperimentPlan plan;
  nlohmann::json dataset;
};
absl::StatusOr<PlanFile> ParsePlan(const nlohmann::json& j);

// Materializes the plan's dataset. Generated taxi samples are written under
// `scratch` before ingestion.
absl::StatusOr<Dataset> ResolveDataset(const nlohmann::json& spec,
                                       const std::filesystem::path& plan_dir,
                                       const std::filesystem::path& scratch);

}  // namespace pattern_dp

#endif  // PATTERN_DP_CLI_H_
