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

#include "pattern_dp/io.h"

#include <openssl/evp.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "absl/strings/str_format.h"

namespace pattern_dp {
namespace {

using nlohmann::json;

std::string ModeName(MatchMode m) {
  return m == MatchMode::kSequence ? "sequence" : "set";
}

std::string RoleName(PrivacyRole r) {
  switch (r) {
    case PrivacyRole::kPrivate:
      return "private";
    case PrivacyRole::kTarget:
      return "target";
    case PrivacyRole::kNone:
      return "none";
  }
  return "none";
}

absl::StatusOr<ElementPredicate> ElementFromJson(const json& j) {
  ElementPredicate el;
  if (j.is_number_integer()) {
    el.kinds.insert(j.get<EventKind>());
    return el;
  }
  if (!j.is_object() || !j.contains("kinds") || !j["kinds"].is_array()) {
    return absl::InvalidArgumentError(
        "element must be a kind or an object with a \"kinds\" array");
  }
  for (const json& k : j["kinds"]) {
    if (!k.is_number_integer()) {
      return absl::InvalidArgumentError("element kinds must be integers");
    }
    el.kinds.insert(k.get<EventKind>());
  }
  if (j.contains("cells")) {
    if (!j["cells"].is_array()) {
      return absl::InvalidArgumentError("element cells must be an array");
    }
    std::set<int64_t> cells;
    for (const json& c : j["cells"]) {
      if (!c.is_number_integer()) {
        return absl::InvalidArgumentError("cells must be integers");
      }
      cells.insert(c.get<int64_t>());
    }
    el.cells = std::move(cells);
  }
  return el;
}

}  // namespace

void WriteEventsJsonl(const EventStream& stream, std::ostream& out) {
  for (const Event& e : stream.events()) {
    json j = {{"stream_id", e.stream_id},
              {"timestamp", e.timestamp},
              {"kind", e.kind}};
    if (e.payload.has_value()) j["payload"] = *e.payload;
    out << j.dump() << '\n';
  }
}

absl::StatusOr<EventStream> ReadEventsJsonl(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: not a JSON object", line_no));
    }
    if (!j.contains("stream_id") || !j.contains("timestamp") ||
        !j.contains("kind") || !j["timestamp"].is_number_integer() ||
        !j["kind"].is_number_integer()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: needs stream_id, integer timestamp and integer kind",
          line_no));
    }
    Event e;
    e.stream_id = j["stream_id"].is_string() ? j["stream_id"].get<std::string>()
                                             : j["stream_id"].dump();
    e.timestamp = j["timestamp"].get<Tick>();
    e.kind = j["kind"].get<EventKind>();
    if (j.contains("payload") && !j["payload"].is_null()) {
      if (!j["payload"].is_number_integer()) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d: payload must be an integer", line_no));
      }
      e.payload = j["payload"].get<int64_t>();
    }
    events.push_back(std::move(e));
  }
  return EventStream::CreateRenumbered(std::move(events));
}

json QueriesToJson(std::span<const PatternQuery> queries) {
  json arr = json::array();
  for (const PatternQuery& q : queries) {
    json elements = json::array();
    for (const ElementPredicate& el : q.elements) {
      if (el.kinds.size() == 1 && !el.cells.has_value()) {
        elements.push_back(*el.kinds.begin());
      } else {
        json obj = {{"kinds", el.kinds}};
        if (el.cells.has_value()) obj["cells"] = *el.cells;
        elements.push_back(std::move(obj));
      }
    }
    json j = {{"id", q.id},
              {"elements", std::move(elements)},
              {"mode", ModeName(q.mode)},
              {"window", q.window},
              {"privacy_role", RoleName(q.role)}};
    if (q.partition_by_stream) j["partition"] = "stream_id";
    arr.push_back(std::move(j));
  }
  return arr;
}

absl::StatusOr<std::vector<PatternQuery>> QueriesFromJson(const json& j) {
  if (!j.is_array()) {
    return absl::InvalidArgumentError("query file must hold a JSON array");
  }
  std::vector<PatternQuery> out;
  std::set<std::string> ids;
  for (const json& item : j) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string() ||
        !item.contains("elements") || !item["elements"].is_array()) {
      return absl::InvalidArgumentError(
          "each query needs a string id and an elements array");
    }
    PatternQuery q;
    q.id = item["id"].get<std::string>();
    for (const json& el : item["elements"]) {
      auto pred = ElementFromJson(el);
      if (!pred.ok()) {
        return absl::InvalidArgumentError(
            absl::StrFormat("query %s: %s", q.id, pred.status().message()));
      }
      q.elements.push_back(*std::move(pred));
    }
    const std::string mode = item.value("mode", "set");
    if (mode == "set") {
      q.mode = MatchMode::kSet;
    } else if (mode == "sequence") {
      q.mode = MatchMode::kSequence;
    } else {
      return absl::InvalidArgumentError(
          absl::StrFormat("query %s: unknown mode '%s'", q.id, mode));
    }
    if (!item.contains("window") || !item["window"].is_number_integer()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("query %s: window must be an integer", q.id));
    }
    q.window = item["window"].get<Tick>();
    const std::string role = item.value("privacy_role", "none");
    if (role == "private") {
      q.role = PrivacyRole::kPrivate;
    } else if (role == "target") {
      q.role = PrivacyRole::kTarget;
    } else if (role == "none") {
      q.role = PrivacyRole::kNone;
    } else {
      return absl::InvalidArgumentError(
          absl::StrFormat("query %s: unknown privacy_role '%s'", q.id, role));
    }
    if (item.contains("partition")) {
      if (item["partition"] != "stream_id") {
        return absl::InvalidArgumentError(absl::StrFormat(
            "query %s: only \"stream_id\" partitioning is supported", q.id));
      }
      q.partition_by_stream = true;
    }
    if (auto s = q.Validate(); !s.ok()) return s;
    if (!ids.insert(q.id).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("duplicate query id %s", q.id));
    }
    out.push_back(std::move(q));
  }
  return out;
}

json AllocationToJson(const BudgetAllocation& alloc) {
  return {{"query_id", alloc.query_id},
          {"epsilon_total", alloc.epsilon_total},
          {"per_element", alloc.per_element},
          {"probs", alloc.probs},
          {"composed_epsilon", ComposedEpsilon(alloc)}};
}

void WriteResponsesJsonl(std::span<const BinaryResponse> responses,
                         std::ostream& out) {
  for (const BinaryResponse& r : responses) {
    out << json{{"instance_id", r.instance},
                {"element_index", r.element},
                {"input_bit", r.input_bit},
                {"output_bit", r.output_bit}}
               .dump()
        << '\n';
  }
}

void WriteTraceJsonl(std::span<const TraceEntry> trace, std::ostream& out) {
  for (const TraceEntry& t : trace) {
    out << json{{"iteration", t.iteration},
                {"probe", t.probe},
                {"feasible", t.feasible},
                {"q", t.q},
                {"q_stderr", t.q_stderr},
                {"committed", t.committed},
                {"eps", t.eps}}
               .dump()
        << '\n';
  }
}

void WriteBaselineJsonl(const BaselineAllocation& alloc, std::ostream& out) {
  for (const auto& [slot, eps] : alloc.per_timestamp) {
    out << json{{"timestamp", slot}, {"eps", eps}}.dump() << '\n';
  }
}

json AreasToJson(const AreaAssignment& areas) {
  std::vector<int64_t> overlap;
  for (int64_t c : areas.private_cells) {
    if (areas.target_cells.contains(c)) overlap.push_back(c);
  }
  return {{"private_cells", areas.private_cells},
          {"target_cells", areas.target_cells},
          {"overlap_cells", overlap}};
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot read %s", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  out.close();
  if (!out) {
    return absl::UnavailableError(
        absl::StrFormat("cannot write %s", path.string()));
  }
  return absl::OkStatus();
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += absl::StrFormat("%02x", digest[i]);
  }
  return hex;
}

}  // namespace pattern_dp
