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

#ifndef PATTERN_DP_DATASETS_H_
#define PATTERN_DP_DATASETS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pattern_dp/matcher.h"
#include "pattern_dp/stream_model.h"

namespace pattern_dp {

// ---------------------------------------------------------------------------
// Synthetic windows of basic events.
//
// Each of n_event_kinds kinds gets a natural occurrence probability drawn
// uniformly from [0, 1). Window m (timestamp m, window length 1) contains kind
// n iff an independent uniform draw is below that probability. n_patterns SET
// queries of elements_per_pattern distinct kinds each are generated; n_private
// of them are marked private and a disjoint n_target are marked target.

struct SynthConfig {
  int n_event_kinds = 20;
  int n_windows = 1000;
  int n_patterns = 20;
  int elements_per_pattern = 3;
  int n_private = 3;
  int n_target = 5;
  uint64_t seed = 0;
  // Overrides the drawn occurrence probabilities (one per kind).
  std::optional<std::vector<double>> occurrence;

  absl::Status Validate() const;
};

struct SynthDataset {
  EventStream events;
  std::vector<PatternQuery> queries;
  std::vector<double> occurrence;
};

inline constexpr std::string_view kSyntheticStreamId = "synthetic";

absl::StatusOr<SynthDataset> Synthesize(const SynthConfig& cfg);

// ---------------------------------------------------------------------------
// GPS fixes on a square grid.

struct GridSpec {
  double cell_size_m = 623.0;
  double lon_min = 116.0;
  double lon_max = 116.8;
  double lat_min = 39.6;
  double lat_max = 40.3;
  double private_fraction = 0.20;
  double extra_target_fraction = 0.40;
  double private_to_target_fraction = 0.50;
  uint64_t seed = 0;

  absl::Status Validate() const;
  // Equirectangular projection about lat_min; row-major cell ids with
  // cell 0 at (lon_min, lat_min).
  int64_t columns() const;
  int64_t rows() const;
  absl::StatusOr<int64_t> CellOf(double lon, double lat) const;
};

inline constexpr double kMetersPerDegreeLat = 111194.92664455873;

struct IngestResult {
  EventStream events;
  size_t lines = 0;
  size_t malformed = 0;
  size_t out_of_bounds = 0;
};

// Parses "YYYY-MM-DD HH:MM:SS" (UTC) into seconds since the epoch.
absl::StatusOr<Tick> ParseDateTime(std::string_view text);
std::string FormatDateTime(Tick seconds);

// Reads one T-Drive text file (taxi id, datetime, longitude, latitude per
// line). Every fix becomes a kCellEntry event whose payload is its grid cell.
// Fixes outside the grid are dropped and counted; malformed lines are counted
// and skipped, and more than 10% malformed lines is an error.
absl::StatusOr<IngestResult> IngestTdrive(const std::filesystem::path& path,
                                          const GridSpec& grid);

struct DirectoryIngest {
  EventStream events;
  std::map<std::string, IngestResult> per_file;  // events moved out
};

// Ingests every regular file in `dir` (sorted by name) and merges them.
absl::StatusOr<DirectoryIngest> IngestTdriveDirectory(
    const std::filesystem::path& dir, const GridSpec& grid);

struct AreaAssignment {
  std::set<int64_t> private_cells;
  std::set<int64_t> target_cells;
};

// round(private_fraction * n) private cells; the target area is
// round(private_to_target_fraction * |private|) of them plus
// round(extra_target_fraction * n) cells drawn from the rest. Needs n >= 10.
absl::StatusOr<AreaAssignment> AssignAreas(const std::set<int64_t>& cells,
                                           const GridSpec& grid);

std::set<int64_t> DistinctCells(const EventStream& stream);

// Single-element, per-taxi queries: "private_area" and "target_area".
std::vector<PatternQuery> AreaQueries(const AreaAssignment& areas, Tick window);

inline constexpr Tick kDefaultTaxiWindow = 3540;

// ---------------------------------------------------------------------------
// Stand-in for the taxi dataset: persistent random walks at the native
// sampling rate, written in the T-Drive text format.

struct TaxiSampleConfig {
  int taxis = 100;
  int fixes_per_taxi = 488;  // one day at 177 s
  Tick interval_s = 177;
  double step_m = 623.0;
  double center_lon = 116.40;
  double center_lat = 39.91;
  double half_width_m = 5000.0;
  double park_probability = 0.3;
  Tick start = 1201910400;  // 2008-02-02 00:00:00 UTC
  uint64_t seed = 0;
};

// File name -> file contents.
std::map<std::string, std::string> GenerateTaxiSample(
    const TaxiSampleConfig& cfg);

absl::Status WriteTaxiSample(const std::filesystem::path& dir,
                             const TaxiSampleConfig& cfg);

}  // namespace pattern_dp

#endif  // PATTERN_DP_DATASETS_H_
