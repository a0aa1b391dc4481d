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

#include "pattern_dp/datasets.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/strings/ascii.h"
#include "pattern_dp/rng.h"

namespace pattern_dp {
namespace {

constexpr double kMaxMalformedFraction = 0.10;

double MetersPerDegreeLon(double lat) {
  return kMetersPerDegreeLat * std::cos(lat * std::numbers::pi / 180.0);
}

}  // namespace

absl::Status SynthConfig::Validate() const {
  if (n_event_kinds < 1 || n_windows < 0 || n_patterns < 0 ||
      elements_per_pattern < 1 || n_private < 0 || n_target < 0) {
    return absl::InvalidArgumentError("synthetic config has negative sizes");
  }
  if (n_private + n_target > n_patterns) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%d private + %d target patterns exceed %d patterns", n_private,
        n_target, n_patterns));
  }
  if (elements_per_pattern > n_event_kinds) {
    return absl::InvalidArgumentError(
        "patterns need more distinct kinds than exist");
  }
  if (occurrence.has_value()) {
    if (static_cast<int>(occurrence->size()) != n_event_kinds) {
      return absl::InvalidArgumentError(
          "occurrence override needs one probability per kind");
    }
    for (double p : *occurrence) {
      if (!(p >= 0 && p <= 1)) {
        return absl::InvalidArgumentError("occurrence probability outside [0, 1]");
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SynthDataset> Synthesize(const SynthConfig& cfg) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  SeededRng rng(cfg.seed);
  SynthDataset out;

  out.occurrence.resize(cfg.n_event_kinds);
  for (double& p : out.occurrence) p = rng.Uniform();
  if (cfg.occurrence.has_value()) out.occurrence = *cfg.occurrence;

  std::vector<Event> events;
  for (int m = 0; m < cfg.n_windows; ++m) {
    for (int n = 0; n < cfg.n_event_kinds; ++n) {
      if (rng.Uniform() < out.occurrence[n]) {
        Event e;
        e.stream_id = std::string(kSyntheticStreamId);
        e.timestamp = m;
        e.kind = n;
        events.push_back(std::move(e));
      }
    }
  }
  auto stream = EventStream::CreateRenumbered(std::move(events));
  if (!stream.ok()) return stream.status();
  out.events = *std::move(stream);

  std::vector<int> order(cfg.n_patterns);
  for (int i = 0; i < cfg.n_patterns; ++i) order[i] = i;
  rng.Shuffle(order);
  std::vector<PrivacyRole> roles(cfg.n_patterns, PrivacyRole::kNone);
  for (int i = 0; i < cfg.n_private; ++i) roles[order[i]] = PrivacyRole::kPrivate;
  for (int i = 0; i < cfg.n_target; ++i) {
    roles[order[cfg.n_private + i]] = PrivacyRole::kTarget;
  }

  std::vector<int> kinds(cfg.n_event_kinds);
  for (int i = 0; i < cfg.n_event_kinds; ++i) kinds[i] = i;
  for (int i = 0; i < cfg.n_patterns; ++i) {
    rng.Shuffle(kinds);
    PatternQuery q;
    q.id = absl::StrFormat("P%d", i + 1);
    q.mode = MatchMode::kSet;
    q.window = 1;
    q.role = roles[i];
    for (int k = 0; k < cfg.elements_per_pattern; ++k) {
      q.elements.push_back({{kinds[k]}, std::nullopt});
    }
    out.queries.push_back(std::move(q));
  }
  return out;
}

absl::Status GridSpec::Validate() const {
  if (!(cell_size_m > 0)) {
    return absl::InvalidArgumentError("cell size must be positive");
  }
  if (!(lon_max > lon_min && lat_max > lat_min)) {
    return absl::InvalidArgumentError("bounding box is empty");
  }
  for (double f : {private_fraction, extra_target_fraction,
                   private_to_target_fraction}) {
    if (!(f >= 0 && f <= 1)) {
      return absl::InvalidArgumentError("area fractions must be in [0, 1]");
    }
  }
  if (private_fraction + extra_target_fraction > 1) {
    return absl::InvalidArgumentError(
        "private and extra target fractions exceed the whole area");
  }
  return absl::OkStatus();
}

int64_t GridSpec::columns() const {
  const double width = (lon_max - lon_min) * MetersPerDegreeLon(lat_min);
  return static_cast<int64_t>(std::ceil(width / cell_size_m));
}

int64_t GridSpec::rows() const {
  const double height = (lat_max - lat_min) * kMetersPerDegreeLat;
  return static_cast<int64_t>(std::ceil(height / cell_size_m));
}

absl::StatusOr<int64_t> GridSpec::CellOf(double lon, double lat) const {
  if (!(lon >= lon_min && lon < lon_max && lat >= lat_min && lat < lat_max)) {
    return absl::OutOfRangeError(
        absl::StrFormat("fix (%.6f, %.6f) is outside the grid", lon, lat));
  }
  const auto col = static_cast<int64_t>(
      std::floor((lon - lon_min) * MetersPerDegreeLon(lat_min) / cell_size_m));
  const auto row = static_cast<int64_t>(
      std::floor((lat - lat_min) * kMetersPerDegreeLat / cell_size_m));
  return row * columns() + std::min(col, columns() - 1);
}

absl::StatusOr<Tick> ParseDateTime(std::string_view text) {
  int y, mo, d, h, mi, s;
  char tail;
  const std::string str(
      absl::StripAsciiWhitespace(absl::string_view(text.data(), text.size())));
  if (std::sscanf(str.c_str(), "%4d-%2d-%2d %2d:%2d:%2d%c", &y, &mo, &d, &h,
                  &mi, &s, &tail) != 6) {
    return absl::InvalidArgumentError(
        absl::StrFormat("bad datetime '%s'", str));
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
    return absl::InvalidArgumentError(
        absl::StrFormat("invalid datetime '%s'", str));
  }
  const auto days = sys_days(ymd).time_since_epoch().count();
  return static_cast<Tick>(days) * 86400 + h * 3600 + mi * 60 + s;
}

std::string FormatDateTime(Tick seconds) {
  using namespace std::chrono;
  const int64_t day_count =
      seconds >= 0 ? seconds / 86400 : -((-seconds + 86399) / 86400);
  const int64_t rem = seconds - day_count * 86400;
  const year_month_day ymd{sys_days{days{day_count}}};
  return absl::StrFormat("%04d-%02d-%02d %02d:%02d:%02d",
                         static_cast<int>(ymd.year()),
                         static_cast<unsigned>(ymd.month()),
                         static_cast<unsigned>(ymd.day()), rem / 3600,
                         (rem / 60) % 60, rem % 60);
}

absl::StatusOr<IngestResult> IngestTdrive(const std::filesystem::path& path,
                                          const GridSpec& grid) {
  if (auto s = grid.Validate(); !s.ok()) return s;
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot read %s", path.string()));
  }
  IngestResult result;
  std::vector<Event> events;
  std::string line;
  while (std::getline(in, line)) {
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    ++result.lines;
    std::vector<absl::string_view> fields = absl::StrSplit(view, ',');
    double lon, lat;
    if (fields.size() != 4 || absl::StripAsciiWhitespace(fields[0]).empty() ||
        !absl::SimpleAtod(fields[2], &lon) || !absl::SimpleAtod(fields[3], &lat)) {
      ++result.malformed;
      continue;
    }
    auto t = ParseDateTime(std::string_view(fields[1].data(), fields[1].size()));
    if (!t.ok()) {
      ++result.malformed;
      continue;
    }
    auto cell = grid.CellOf(lon, lat);
    if (!cell.ok()) {
      ++result.out_of_bounds;
      continue;
    }
    Event e;
    e.stream_id = std::string(absl::StripAsciiWhitespace(fields[0]));
    e.timestamp = *t;
    e.kind = kCellEntry;
    e.payload = *cell;
    events.push_back(std::move(e));
  }
  if (result.lines > 0 &&
      static_cast<double>(result.malformed) >
          kMaxMalformedFraction * static_cast<double>(result.lines)) {
    return absl::DataLossError(absl::StrFormat(
        "%s: %d of %d lines malformed; is this T-Drive text format?",
        path.string(), result.malformed, result.lines));
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) {
                     return a.timestamp < b.timestamp;
                   });
  auto stream = EventStream::CreateRenumbered(std::move(events));
  if (!stream.ok()) return stream.status();
  result.events = *std::move(stream);
  return result;
}

absl::StatusOr<DirectoryIngest> IngestTdriveDirectory(
    const std::filesystem::path& dir, const GridSpec& grid) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    return absl::NotFoundError(
        absl::StrFormat("%s is not a directory", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) {
    return absl::UnavailableError(
        absl::StrFormat("cannot list %s: %s", dir.string(), ec.message()));
  }
  if (files.empty()) {
    return absl::NotFoundError(
        absl::StrFormat("no input files in %s", dir.string()));
  }
  std::sort(files.begin(), files.end());
  DirectoryIngest out;
  std::vector<EventStream> streams;
  for (const auto& f : files) {
    auto r = IngestTdrive(f, grid);
    if (!r.ok()) return r.status();
    streams.push_back(std::move(r->events));
    r->events = EventStream();
    out.per_file.emplace(f.filename().string(), *std::move(r));
  }
  out.events = MergeStreams(streams);
  return out;
}

absl::StatusOr<AreaAssignment> AssignAreas(const std::set<int64_t>& cells,
                                           const GridSpec& grid) {
  if (auto s = grid.Validate(); !s.ok()) return s;
  if (cells.size() < 10) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "area assignment needs at least 10 cells, got %d", cells.size()));
  }
  const double n = static_cast<double>(cells.size());
  const auto n_private = static_cast<size_t>(std::lround(grid.private_fraction * n));
  const auto n_overlap = static_cast<size_t>(
      std::lround(grid.private_to_target_fraction * n_private));
  const auto n_extra =
      static_cast<size_t>(std::lround(grid.extra_target_fraction * n));

  SeededRng rng(grid.seed);
  std::vector<int64_t> all(cells.begin(), cells.end());
  rng.Shuffle(all);
  std::vector<int64_t> priv(all.begin(), all.begin() + n_private);
  std::vector<int64_t> rest(all.begin() + n_private, all.end());

  AreaAssignment out;
  out.private_cells.insert(priv.begin(), priv.end());
  rng.Shuffle(priv);
  out.target_cells.insert(priv.begin(), priv.begin() + n_overlap);
  rng.Shuffle(rest);
  out.target_cells.insert(rest.begin(),
                          rest.begin() + std::min(n_extra, rest.size()));
  return out;
}

std::set<int64_t> DistinctCells(const EventStream& stream) {
  std::set<int64_t> out;
  for (const Event& e : stream.events()) {
    if (e.payload.has_value()) out.insert(*e.payload);
  }
  return out;
}

std::vector<PatternQuery> AreaQueries(const AreaAssignment& areas, Tick window) {
  auto make = [window](std::string id, const std::set<int64_t>& cells,
                       PrivacyRole role) {
    PatternQuery q;
    q.id = std::move(id);
    q.elements.push_back({{kCellEntry}, cells});
    q.mode = MatchMode::kSet;
    q.window = window;
    q.role = role;
    q.partition_by_stream = true;
    return q;
  };
  return {make("private_area", areas.private_cells, PrivacyRole::kPrivate),
          make("target_area", areas.target_cells, PrivacyRole::kTarget)};
}

std::map<std::string, std::string> GenerateTaxiSample(
    const TaxiSampleConfig& cfg) {
  SeededRng rng(cfg.seed);
  const double m_per_lon = MetersPerDegreeLon(cfg.center_lat);
  std::map<std::string, std::string> files;
  for (int taxi = 1; taxi <= cfg.taxis; ++taxi) {
    double x = (2 * rng.Uniform() - 1) * cfg.half_width_m;
    double y = (2 * rng.Uniform() - 1) * cfg.half_width_m;
    double heading = 2 * std::numbers::pi * rng.Uniform();
    std::string body;
    for (int k = 0; k < cfg.fixes_per_taxi; ++k) {
      const Tick t = cfg.start + k * cfg.interval_s;
      body += absl::StrFormat("%d,%s,%.5f,%.5f\n", taxi, FormatDateTime(t),
                              cfg.center_lon + x / m_per_lon,
                              cfg.center_lat + y / kMetersPerDegreeLat);
      if (rng.Uniform() < cfg.park_probability) continue;
      heading += (rng.Uniform() - 0.5) * std::numbers::pi / 2;
      x += cfg.step_m * std::cos(heading);
      y += cfg.step_m * std::sin(heading);
      // Reflect at the edges of the operating area.
      if (std::abs(x) > cfg.half_width_m) {
        x = std::copysign(2 * cfg.half_width_m - std::abs(x), x);
        heading = std::numbers::pi - heading;
      }
      if (std::abs(y) > cfg.half_width_m) {
        y = std::copysign(2 * cfg.half_width_m - std::abs(y), y);
        heading = -heading;
      }
    }
    files.emplace(absl::StrFormat("%04d.txt", taxi), std::move(body));
  }
  return files;
}

absl::Status WriteTaxiSample(const std::filesystem::path& dir,
                             const TaxiSampleConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrFormat("cannot create %s: %s", dir.string(), ec.message()));
  }
  for (const auto& [name, body] : GenerateTaxiSample(cfg)) {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
    if (!out) {
      return absl::UnavailableError(
          absl::StrFormat("cannot write %s", (dir / name).string()));
    }
  }
  return absl::OkStatus();
}

}  // namespace pattern_dp
