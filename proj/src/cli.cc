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

#include "pattern_dp/cli.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "pattern_dp/datasets.h"
#include "pattern_dp/io.h"
#include "pattern_dp/ppm_core.h"

#ifndef PATTERN_DP_VERSION
#define PATTERN_DP_VERSION "0.0.0"
#endif

namespace pattern_dp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kEventsFile[] = "events.jsonl";
constexpr char kQueriesFile[] = "queries.json";
constexpr char kManifestFile[] = "manifest.json";

std::string SerializeEvents(const EventStream& stream) {
  std::ostringstream ss;
  WriteEventsJsonl(stream, ss);
  return ss.str();
}

std::string SerializeQueries(std::span<const PatternQuery> queries) {
  return QueriesToJson(queries).dump(2) + "\n";
}

// Status with the exit code it maps to.
struct CliError {
  int code;
  absl::Status status;
};

absl::Status WriteManifest(const fs::path& dir, const std::string& command,
                           json config, json seeds,
                           const std::string& dataset_sha256,
                           const std::map<std::string, std::string>& outputs) {
  json out = json::object();
  for (const auto& [name, contents] : outputs) out[name] = Sha256Hex(contents);
  json manifest = {{"tool", "pattern_dp"},
                   {"version", PATTERN_DP_VERSION},
                   {"command", command},
                   {"config", std::move(config)},
                   {"seeds", std::move(seeds)},
                   {"dataset_sha256", dataset_sha256},
                   {"outputs", std::move(out)}};
  return WriteFile(dir / kManifestFile, manifest.dump(2) + "\n");
}

absl::Status EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrFormat(
        "cannot create directory %s: %s", dir.string(), ec.message()));
  }
  return absl::OkStatus();
}

absl::Status WriteOutputs(const fs::path& dir,
                          const std::map<std::string, std::string>& outputs) {
  if (auto s = EnsureDir(dir); !s.ok()) return s;
  for (const auto& [name, contents] : outputs) {
    if (auto s = WriteFile(dir / name, contents); !s.ok()) return s;
  }
  return absl::OkStatus();
}

struct AreaDataset {
  Dataset data;
  AreaAssignment areas;
  std::map<std::string, IngestResult> per_file;
};

absl::StatusOr<AreaDataset> BuildAreaDataset(const fs::path& tdrive_dir,
                                             const GridSpec& grid,
                                             Tick window) {
  auto ingest = IngestTdriveDirectory(tdrive_dir, grid);
  if (!ingest.ok()) return ingest.status();
  auto areas = AssignAreas(DistinctCells(ingest->events), grid);
  if (!areas.ok()) return areas.status();
  AreaDataset out;
  out.data.events = std::move(ingest->events);
  out.data.queries = AreaQueries(*areas, window);
  out.areas = *std::move(areas);
  out.per_file = std::move(ingest->per_file);
  return out;
}

template <typename T>
absl::StatusOr<T> Field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    return absl::InvalidArgumentError(
        absl::StrFormat("plan field \"%s\" has the wrong type", key));
  }
}

#define PDP_ASSIGN_FIELD(lhs, j, key, fallback)        \
  do {                                                 \
    auto field_or = Field(j, key, fallback);           \
    if (!field_or.ok()) return field_or.status();      \
    lhs = *field_or;                                   \
  } while (0)

// ---------------------------------------------------------------------------
// Subcommands.

struct SynthArgs {
  uint64_t seed = 0;
  std::string out;
  int windows = 1000;
  int kinds = 20;
  int patterns = 20;
};

int CmdSynth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  SynthConfig cfg;
  cfg.seed = a.seed;
  cfg.n_windows = a.windows;
  cfg.n_event_kinds = a.kinds;
  cfg.n_patterns = a.patterns;
  auto synth = Synthesize(cfg);
  if (!synth.ok()) {
    err << "synth: " << synth.status().message() << "\n";
    return kExitUsage;
  }
  const Dataset data{std::move(synth->events), std::move(synth->queries)};
  const std::map<std::string, std::string> outputs = {
      {kEventsFile, SerializeEvents(data.events)},
      {kQueriesFile, SerializeQueries(data.queries)}};
  const fs::path dir(a.out);
  absl::Status s = WriteOutputs(dir, outputs);
  if (s.ok()) {
    s = WriteManifest(dir, "synth",
                      {{"windows", a.windows},
                       {"kinds", a.kinds},
                       {"patterns", a.patterns},
                       {"elements_per_pattern", cfg.elements_per_pattern},
                       {"private", cfg.n_private},
                       {"target", cfg.n_target},
                       {"occurrence", synth->occurrence}},
                      {{"seed", a.seed}}, DatasetFingerprint(data), outputs);
  }
  if (!s.ok()) {
    err << "synth: " << s.message() << "\n";
    return kExitFailure;
  }
  out << absl::StrFormat("wrote %d events and %d queries to %s\n",
                         data.events.size(), data.queries.size(), dir.string());
  return kExitOk;
}

struct TaxiSampleArgs {
  uint64_t seed = 0;
  std::string out;
  int taxis = 100;
  int fixes = 488;
};

int CmdTaxiSample(const TaxiSampleArgs& a, std::ostream& out,
                  std::ostream& err) {
  TaxiSampleConfig cfg;
  cfg.seed = a.seed;
  cfg.taxis = a.taxis;
  cfg.fixes_per_taxi = a.fixes;
  if (auto s = WriteTaxiSample(a.out, cfg); !s.ok()) {
    err << "taxi-sample: " << s.message() << "\n";
    return kExitFailure;
  }
  out << absl::StrFormat("wrote %d taxi files to %s\n", a.taxis, a.out);
  return kExitOk;
}

struct IngestArgs {
  std::string tdrive_dir;
  double cell_size = 623.0;
  uint64_t seed = 0;
  std::string out;
  Tick window = kDefaultTaxiWindow;
};

int CmdIngest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  GridSpec grid;
  grid.cell_size_m = a.cell_size;
  grid.seed = a.seed;
  if (auto s = grid.Validate(); !s.ok()) {
    err << "ingest: " << s.message() << "\n";
    return kExitUsage;
  }
  auto built = BuildAreaDataset(a.tdrive_dir, grid, a.window);
  if (!built.ok()) {
    err << "ingest: " << built.status().message() << "\n";
    return kExitFailure;
  }
  json per_file = json::object();
  for (const auto& [name, r] : built->per_file) {
    per_file[name] = {{"lines", r.lines},
                      {"malformed", r.malformed},
                      {"out_of_bounds", r.out_of_bounds}};
  }
  const std::map<std::string, std::string> outputs = {
      {kEventsFile, SerializeEvents(built->data.events)},
      {kQueriesFile, SerializeQueries(built->data.queries)},
      {"areas.json", AreasToJson(built->areas).dump(2) + "\n"}};
  const fs::path dir(a.out);
  absl::Status s = WriteOutputs(dir, outputs);
  if (s.ok()) {
    s = WriteManifest(dir, "ingest",
                      {{"tdrive_dir", a.tdrive_dir},
                       {"cell_size_m", a.cell_size},
                       {"window", a.window},
                       {"files", per_file}},
                      {{"seed", a.seed}}, DatasetFingerprint(built->data),
                      outputs);
  }
  if (!s.ok()) {
    err << "ingest: " << s.message() << "\n";
    return kExitFailure;
  }
  out << absl::StrFormat("ingested %d events from %d files; %d distinct cells\n",
                         built->data.events.size(), built->per_file.size(),
                         DistinctCells(built->data.events).size());
  return kExitOk;
}

struct AllocateArgs {
  std::string dataset;
  std::string private_query;
  double eps = 0;
  std::string mode = "uniform";
  uint64_t seed = 0;
  int trials = 200;
  std::optional<double> delta;
  std::string conserve = "conserving";
  std::string out;
};

int CmdAllocate(const AllocateArgs& a, std::ostream& out, std::ostream& err) {
  auto data = LoadDataset(a.dataset);
  if (!data.ok()) {
    err << "allocate: " << data.status().message() << "\n";
    return kExitFailure;
  }
  const PatternQuery* q = FindQuery(data->queries, a.private_query);
  if (q == nullptr) {
    err << absl::StrFormat("allocate: no query '%s' in %s\n", a.private_query,
                           a.dataset);
    return kExitFailure;
  }
  json doc;
  if (a.mode == "uniform") {
    auto alloc = UniformAllocate(q->id, a.eps, q->size());
    if (!alloc.ok()) {
      err << "allocate: " << alloc.status().message() << "\n";
      return kExitFailure;
    }
    doc = AllocationToJson(*alloc);
  } else {
    OptimizerConfig cfg;
    cfg.seed = a.seed;
    cfg.trials = a.trials;
    cfg.delta_eps = a.delta;
    cfg.conserve_mode = a.conserve == "paper_literal"
                            ? ConserveMode::kPaperLiteral
                            : ConserveMode::kConserving;
    const std::vector<PatternQuery> targets =
        QueriesWithRole(data->queries, PrivacyRole::kTarget);
    auto opt = Optimize(data->events, *q, targets, a.eps, cfg);
    if (!opt.ok()) {
      err << "allocate: " << opt.status().message() << "\n";
      return kExitFailure;
    }
    doc = AllocationToJson(opt->allocation);
    doc["quality"] = {{"q", opt->quality.q_mean},
                      {"q_stderr", opt->quality.q_stderr},
                      {"prec", opt->quality.prec},
                      {"rec", opt->quality.rec}};
    doc["iterations"] = opt->iterations;
    json trace = json::array();
    for (const TraceEntry& t : opt->trace) {
      trace.push_back({{"iteration", t.iteration},
                       {"probe", t.probe},
                       {"feasible", t.feasible},
                       {"q", t.q},
                       {"q_stderr", t.q_stderr},
                       {"committed", t.committed},
                       {"eps", t.eps}});
    }
    doc["trace"] = std::move(trace);
  }
  doc["mode"] = a.mode;
  doc["seed"] = a.seed;
  const std::string text = doc.dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
    return kExitOk;
  }
  if (auto s = WriteFile(a.out, text); !s.ok()) {
    err << "allocate: " << s.message() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct RunArgs {
  std::string plan;
  std::string out;
  std::optional<int> jobs;
};

int CmdRun(const RunArgs& a, std::ostream& out, std::ostream& err) {
  auto text = ReadFile(a.plan);
  if (!text.ok()) {
    err << "run: " << text.status().message() << "\n";
    return kExitUsage;
  }
  json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    err << absl::StrFormat("run: %s is not valid JSON\n", a.plan);
    return kExitUsage;
  }
  auto parsed = ParsePlan(j);
  if (!parsed.ok()) {
    err << absl::StrFormat("run: invalid plan %s: %s\n", a.plan,
                           parsed.status().message());
    return kExitUsage;
  }
  ExperimentPlan plan = parsed->plan;
  if (a.jobs.has_value()) {
    plan.jobs = *a.jobs;
  } else if (const char* env = std::getenv("PATTERN_DP_JOBS")) {
    int jobs = 0;
    if (!absl::SimpleAtoi(env, &jobs) || jobs < 1) {
      err << absl::StrFormat("run: PATTERN_DP_JOBS=%s is not a positive "
                             "integer\n", env);
      return kExitUsage;
    }
    plan.jobs = jobs;
  }
  const fs::path out_dir(a.out);
  if (auto s = EnsureDir(out_dir); !s.ok()) {
    err << "run: " << s.message() << "\n";
    return kExitFailure;
  }
  auto data = ResolveDataset(parsed->dataset,
                             fs::path(a.plan).parent_path(), out_dir / "data");
  if (!data.ok()) {
    err << "run: " << data.status().message() << "\n";
    return kExitFailure;
  }
  auto result = RunExperiment(*data, plan);
  if (!result.ok()) {
    err << "run: " << result.status().message() << "\n";
    return kExitFailure;
  }

  std::string summary = "mechanism,eps,n,mean_mre,stderr_mre\n";
  for (const auto& [key, cell] : SummarizeMre(result->rows)) {
    summary += absl::StrFormat("%s,%.10g,%d,%.10g,%.10g\n",
                               MechanismId(key.first), key.second, cell.n,
                               cell.mean_mre, cell.stderr_mre);
  }
  json allocations = json::object();
  for (const auto& [eps, allocs] : result->adaptive_allocations) {
    json arr = json::array();
    for (const BudgetAllocation& al : allocs) arr.push_back(AllocationToJson(al));
    allocations[absl::StrFormat("%.10g", eps)] = std::move(arr);
  }
  std::map<std::string, std::string> outputs = {
      {"results.csv", ResultsToCsv(result->rows)},
      {"summary.csv", summary}};
  if (!allocations.empty()) {
    outputs["adaptive_allocations.json"] = allocations.dump(2) + "\n";
  }
  absl::Status s = WriteOutputs(out_dir, outputs);
  if (s.ok()) {
    json plan_json = j;
    s = WriteManifest(
        out_dir, "run",
        {{"plan_path", a.plan}, {"plan", plan_json},
         {"jobs", plan.jobs},
         {"q_ord", result->q_ord}},
        {{"seed", plan.seed},
         {"cell_seed", "Derive(seed, {mechanism + 1, eps index, trial})"}},
        DatasetFingerprint(*data), outputs);
  }
  if (!s.ok()) {
    err << "run: " << s.message() << "\n";
    return kExitFailure;
  }
  out << summary;
  if (const size_t failed = result->failed_rows(); failed > 0) {
    std::map<std::string, int> reasons;
    for (const ResultRow& r : result->rows) {
      if (r.failed) {
        ++reasons[absl::StrFormat("%s eps=%g: %s", MechanismId(r.mechanism),
                                  r.eps, r.error)];
      }
    }
    err << absl::StrFormat("run: %d of %d cells failed\n", failed,
                           result->rows.size());
    for (const auto& [reason, n] : reasons) {
      err << absl::StrFormat("  %d x %s\n", n, reason);
    }
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

std::string DatasetFingerprint(const Dataset& data) {
  return Sha256Hex(SerializeEvents(data.events) +
                   SerializeQueries(data.queries));
}

absl::StatusOr<Dataset> LoadDataset(const fs::path& dir) {
  auto events_text = ReadFile(dir / kEventsFile);
  if (!events_text.ok()) return events_text.status();
  auto queries_text = ReadFile(dir / kQueriesFile);
  if (!queries_text.ok()) return queries_text.status();
  std::istringstream in(*events_text);
  auto events = ReadEventsJsonl(in);
  if (!events.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: %s", (dir / kEventsFile).string(),
                        events.status().message()));
  }
  json qj = json::parse(*queries_text, nullptr, /*allow_exceptions=*/false);
  if (qj.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s is not valid JSON", (dir / kQueriesFile).string()));
  }
  auto queries = QueriesFromJson(qj);
  if (!queries.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: %s", (dir / kQueriesFile).string(),
                        queries.status().message()));
  }
  return Dataset{*std::move(events), *std::move(queries)};
}

absl::StatusOr<std::string> SaveDataset(const Dataset& data,
                                        const fs::path& dir) {
  if (auto s = WriteOutputs(dir, {{kEventsFile, SerializeEvents(data.events)},
                                  {kQueriesFile,
                                   SerializeQueries(data.queries)}});
      !s.ok()) {
    return s;
  }
  return DatasetFingerprint(data);
}

absl::StatusOr<PlanFile> ParsePlan(const json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("plan must be a JSON object");
  }
  if (!j.contains("dataset")) {
    return absl::InvalidArgumentError("plan needs a \"dataset\"");
  }
  PlanFile pf;
  pf.dataset = j["dataset"];
  ExperimentPlan& p = pf.plan;
  if (!j.contains("mechanisms") || !j["mechanisms"].is_array()) {
    return absl::InvalidArgumentError("plan needs a \"mechanisms\" array");
  }
  for (const json& m : j["mechanisms"]) {
    if (!m.is_string()) {
      return absl::InvalidArgumentError("mechanism names must be strings");
    }
    auto mech = ParseMechanism(m.get<std::string>());
    if (!mech.ok()) return mech.status();
    p.mechanisms.push_back(*mech);
  }
  PDP_ASSIGN_FIELD(p.eps_grid, j, "eps", p.eps_grid);
  PDP_ASSIGN_FIELD(p.trials, j, "trials", p.trials);
  PDP_ASSIGN_FIELD(p.alpha, j, "alpha", p.alpha);
  PDP_ASSIGN_FIELD(p.seed, j, "seed", p.seed);
  PDP_ASSIGN_FIELD(p.jobs, j, "jobs", p.jobs);
  if (j.contains("baseline")) {
    const json& b = j["baseline"];
    PDP_ASSIGN_FIELD(p.baseline_w, b, "w", p.baseline_w);
    PDP_ASSIGN_FIELD(p.slot_ticks, b, "slot_ticks", p.slot_ticks);
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    OptimizerConfig& c = p.optimizer;
    PDP_ASSIGN_FIELD(c.trials, o, "trials", c.trials);
    PDP_ASSIGN_FIELD(c.max_iters, o, "max_iters", c.max_iters);
    PDP_ASSIGN_FIELD(c.improve_tol, o, "improve_tol", c.improve_tol);
    if (o.contains("delta_eps")) {
      double d = 0;
      PDP_ASSIGN_FIELD(d, o, "delta_eps", 0.0);
      c.delta_eps = d;
    }
    std::string mode = "conserving";
    PDP_ASSIGN_FIELD(mode, o, "conserve_mode", mode);
    if (mode == "conserving") {
      c.conserve_mode = ConserveMode::kConserving;
    } else if (mode == "paper_literal") {
      c.conserve_mode = ConserveMode::kPaperLiteral;
    } else {
      return absl::InvalidArgumentError(
          absl::StrFormat("unknown conserve_mode '%s'", mode));
    }
  }
  if (auto s = p.Validate(); !s.ok()) return s;
  return pf;
}

absl::StatusOr<Dataset> ResolveDataset(const json& spec,
                                       const fs::path& plan_dir,
                                       const fs::path& scratch) {
  if (spec.is_string()) {
    fs::path dir(spec.get<std::string>());
    if (dir.is_relative()) dir = plan_dir / dir;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      return absl::NotFoundError(
          absl::StrFormat("dataset directory %s does not exist", dir.string()));
    }
    return LoadDataset(dir);
  }
  if (!spec.is_object() || !spec.contains("generate")) {
    return absl::InvalidArgumentError(
        "dataset must be a directory or an object with \"generate\"");
  }
  std::string kind;
  PDP_ASSIGN_FIELD(kind, spec, "generate", kind);
  if (kind == "synthetic") {
    SynthConfig cfg;
    PDP_ASSIGN_FIELD(cfg.seed, spec, "seed", cfg.seed);
    PDP_ASSIGN_FIELD(cfg.n_windows, spec, "windows", cfg.n_windows);
    PDP_ASSIGN_FIELD(cfg.n_event_kinds, spec, "kinds", cfg.n_event_kinds);
    PDP_ASSIGN_FIELD(cfg.n_patterns, spec, "patterns", cfg.n_patterns);
    auto synth = Synthesize(cfg);
    if (!synth.ok()) return synth.status();
    return Dataset{std::move(synth->events), std::move(synth->queries)};
  }
  if (kind == "taxi_sample") {
    TaxiSampleConfig cfg;
    GridSpec grid;
    Tick window = kDefaultTaxiWindow;
    PDP_ASSIGN_FIELD(cfg.seed, spec, "seed", cfg.seed);
    PDP_ASSIGN_FIELD(cfg.taxis, spec, "taxis", cfg.taxis);
    PDP_ASSIGN_FIELD(cfg.fixes_per_taxi, spec, "fixes_per_taxi",
                     cfg.fixes_per_taxi);
    PDP_ASSIGN_FIELD(grid.cell_size_m, spec, "cell_size", grid.cell_size_m);
    PDP_ASSIGN_FIELD(grid.seed, spec, "area_seed", cfg.seed);
    PDP_ASSIGN_FIELD(window, spec, "window", window);
    if (auto s = grid.Validate(); !s.ok()) return s;
    const fs::path dir = scratch / "taxi_sample";
    std::error_code ec;
    fs::remove_all(dir, ec);
    if (auto s = WriteTaxiSample(dir, cfg); !s.ok()) return s;
    auto built = BuildAreaDataset(dir, grid, window);
    if (!built.ok()) return built.status();
    return std::move(built->data);
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown dataset generator '%s'", kind));
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Pattern-level differential privacy for event streams",
               "pattern_dp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PATTERN_DP_VERSION);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate synthetic data");
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--windows", synth.windows, "Number of windows")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--kinds", synth.kinds, "Number of event kinds")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--patterns", synth.patterns, "Number of patterns")
      ->check(CLI::PositiveNumber);

  TaxiSampleArgs taxi;
  CLI::App* taxi_cmd = app.add_subcommand(
      "taxi-sample", "Write a simulated taxi sample in T-Drive format");
  taxi_cmd->add_option("--seed", taxi.seed, "Random seed")->required();
  taxi_cmd->add_option("--out", taxi.out, "Output directory")->required();
  taxi_cmd->add_option("--taxis", taxi.taxis, "Number of taxis")
      ->check(CLI::PositiveNumber);
  taxi_cmd->add_option("--fixes", taxi.fixes, "Fixes per taxi")
      ->check(CLI::PositiveNumber);

  IngestArgs ingest;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Ingest T-Drive files into a dataset");
  ingest_cmd->add_option("--tdrive-dir", ingest.tdrive_dir, "Input directory")
      ->required();
  ingest_cmd->add_option("--cell-size", ingest.cell_size, "Grid cell size (m)")
      ->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--seed", ingest.seed, "Area assignment seed")
      ->required();
  ingest_cmd->add_option("--out", ingest.out, "Output directory")->required();
  ingest_cmd->add_option("--window", ingest.window, "Query window (s)")
      ->check(CLI::PositiveNumber);

  AllocateArgs alloc;
  CLI::App* alloc_cmd =
      app.add_subcommand("allocate", "Allocate a pattern-level budget");
  alloc_cmd->add_option("--dataset", alloc.dataset, "Dataset directory")
      ->required();
  alloc_cmd->add_option("--private-query", alloc.private_query, "Query id")
      ->required();
  alloc_cmd->add_option("--eps", alloc.eps, "Pattern-level budget")
      ->required()
      ->check(CLI::NonNegativeNumber);
  alloc_cmd->add_option("--mode", alloc.mode, "uniform or adaptive")
      ->check(CLI::IsMember({"uniform", "adaptive"}));
  alloc_cmd->add_option("--seed", alloc.seed, "Optimizer seed");
  alloc_cmd->add_option("--trials", alloc.trials, "Trials per evaluation")
      ->check(CLI::PositiveNumber);
  alloc_cmd->add_option("--delta", alloc.delta, "Optimizer step")
      ->check(CLI::PositiveNumber);
  alloc_cmd->add_option("--conserve", alloc.conserve,
                        "conserving or paper_literal")
      ->check(CLI::IsMember({"conserving", "paper_literal"}));
  alloc_cmd->add_option("--out", alloc.out, "Output file (default stdout)");

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment plan");
  run_cmd->add_option("--plan", run.plan, "Plan file (JSON)")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--jobs", run.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*synth_cmd) return CmdSynth(synth, out, err);
  if (*taxi_cmd) return CmdTaxiSample(taxi, out, err);
  if (*ingest_cmd) return CmdIngest(ingest, out, err);
  if (*alloc_cmd) return CmdAllocate(alloc, out, err);
  if (*run_cmd) return CmdRun(run, out, err);
  return kExitUsage;
}

}  // namespace pattern_dp
