// Copyright 2026 The Taskroute Authors
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

#include "taskroute/json_io.h"

#include <string>

namespace taskroute {
namespace {

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidInput, what);
}

}  // namespace

void to_json(Json& j, TaskKind kind) { j = std::string(TaskKindName(kind)); }

void from_json(const Json& j, TaskKind& kind) {
  if (!j.is_string()) Invalid("task kind must be a string");
  auto k = TaskKindFromName(j.get<std::string>());
  if (!k) Invalid("unknown task kind '" + j.get<std::string>() + "'");
  kind = *k;
}

void to_json(Json& j, MediaKind media) { j = std::string(MediaKindName(media)); }

void from_json(const Json& j, MediaKind& media) {
  if (!j.is_string()) Invalid("media kind must be a string");
  auto m = MediaKindFromName(j.get<std::string>());
  if (!m) Invalid("unknown media kind '" + j.get<std::string>() + "'");
  media = *m;
}

void to_json(Json& j, const Region& r) { j = Json::array({r.x1, r.y1, r.x2, r.y2}); }

void from_json(const Json& j, Region& r) {
  if (!j.is_array() || j.size() != 4) Invalid("region must be [x1,y1,x2,y2]");
  for (const auto& v : j) {
    if (!v.is_number()) Invalid("region coordinates must be numbers");
  }
  r = Region{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
             j[3].get<double>()};
  if (!IsValidRegion(r)) {
    throw Error(ErrorCode::kInvalidRegion, "region violates bounds");
  }
}

void to_json(Json& j, const Segment& s) {
  if (const auto* t = s.text()) {
    j = Json{{"type", "text"}, {"content", t->content}};
  } else if (const auto* task = s.task()) {
    j = Json{{"type", "task"},
             {"kind", task->kind},
             {"tag", std::string(TaskKindTag(task->kind))},
             {"payload", task->payload},
             {"regions", task->regions}};
  } else {
    j = Json{{"type", "grounding"}, {"region", s.grounding()->region}};
  }
  j["span"] = Json::array({s.span.offset, s.span.length});
}

void from_json(const Json& j, Segment& s) {
  std::string type = Field<std::string>(j, "type");
  if (type == "text") {
    s = Segment(TextSegment{Field<std::string>(j, "content")});
  } else if (type == "task") {
    s = Segment(TaskSegment{Field<TaskKind>(j, "kind"),
                            Field<std::string>(j, "payload"),
                            FieldOr<std::vector<Region>>(j, "regions", {})});
  } else if (type == "grounding") {
    s = Segment(GroundingSegment{Field<Region>(j, "region")});
  } else {
    Invalid("unknown segment type '" + type + "'");
  }
  if (j.contains("span")) {
    auto span = Field<std::vector<std::size_t>>(j, "span");
    if (span.size() != 2) Invalid("span must be [offset,length]");
    s.span = SourceSpan{span[0], span[1]};
  }
}

void to_json(Json& j, const ParsedMessage& m) {
  j = Json{{"segments", m.segments}};
}

void to_json(Json& j, const Violation& v) {
  j = Json{{"code", std::string(ViolationCodeName(v.code))},
           {"offset", v.offset},
           {"detail", v.detail}};
}

void from_json(const Json& j, Violation& v) {
  auto code = ViolationCodeFromName(Field<std::string>(j, "code"));
  if (!code) Invalid("unknown violation code");
  v = Violation{*code, Field<std::size_t>(j, "offset"),
                Field<std::string>(j, "detail")};
}

Json ParseErrorJson(const ParseError& e) {
  return Json{{"code", std::string(ErrorCodeName(e.code()))},
              {"reason", std::string(MalformedReasonName(e.reason()))},
              {"offset", e.offset()},
              {"detail", e.detail()}};
}

void to_json(Json& j, const ArtifactRef& a) {
  j = Json{{"hash", a.hash}, {"media", a.media}};
}

void from_json(const Json& j, ArtifactRef& a) {
  a = ArtifactRef{Field<std::string>(j, "hash"), Field<MediaKind>(j, "media")};
}

void to_json(Json& j, const ArtifactBinding& b) {
  j = Json{{"media", b.media}};
  if (b.from_ordinal) {
    j["from_ordinal"] = *b.from_ordinal;
  } else {
    j["hash"] = b.hash;
  }
}

void from_json(const Json& j, ArtifactBinding& b) {
  b.media = Field<MediaKind>(j, "media");
  b.hash = FieldOr<std::string>(j, "hash", "");
  b.from_ordinal.reset();
  if (j.contains("from_ordinal")) {
    b.from_ordinal = Field<std::size_t>(j, "from_ordinal");
  }
}

void to_json(Json& j, const TaskInvocation& inv) {
  j = Json{{"ordinal", inv.ordinal},
           {"kind", inv.kind},
           {"prompt", inv.prompt},
           {"regions", inv.regions},
           {"inputs", inv.inputs}};
}

void from_json(const Json& j, TaskInvocation& inv) {
  inv.ordinal = Field<std::size_t>(j, "ordinal");
  inv.kind = Field<TaskKind>(j, "kind");
  inv.prompt = Field<std::string>(j, "prompt");
  inv.regions = FieldOr<std::vector<Region>>(j, "regions", {});
  inv.inputs = FieldOr<std::vector<ArtifactBinding>>(j, "inputs", {});
}

void to_json(Json& j, const RoutingPlan& plan) {
  j = Json{{"session_id", plan.session_id},
           {"turn_index", plan.turn_index},
           {"invocations", plan.invocations},
           {"passthrough_text", plan.passthrough_text},
           {"standalone_regions", plan.standalone_regions}};
}

void from_json(const Json& j, RoutingPlan& plan) {
  plan.session_id = Field<std::string>(j, "session_id");
  plan.turn_index = Field<std::uint64_t>(j, "turn_index");
  plan.invocations = Field<std::vector<TaskInvocation>>(j, "invocations");
  plan.passthrough_text = Field<std::string>(j, "passthrough_text");
  plan.standalone_regions =
      FieldOr<std::vector<Region>>(j, "standalone_regions", {});
}

void to_json(Json& j, const BoolGrid& g) {
  std::vector<std::string> rows;
  for (int r = 0; r < g.rows; ++r) {
    std::string row;
    for (int c = 0; c < g.cols; ++c) row.push_back(g.at(r, c) ? '1' : '0');
    rows.push_back(std::move(row));
  }
  j = Json{{"rows", g.rows}, {"cols", g.cols}, {"cells", rows}};
}

void from_json(const Json& j, BoolGrid& g) {
  g.rows = Field<int>(j, "rows");
  g.cols = Field<int>(j, "cols");
  auto rows = Field<std::vector<std::string>>(j, "cells");
  if (g.rows < 0 || g.cols < 0 || rows.size() != static_cast<size_t>(g.rows)) {
    Invalid("mask grid shape mismatch");
  }
  g.cells.clear();
  for (const auto& row : rows) {
    if (row.size() != static_cast<size_t>(g.cols)) Invalid("mask row width");
    for (char c : row) {
      if (c != '0' && c != '1') Invalid("mask cells must be 0 or 1");
      g.cells.push_back(c == '1');
    }
  }
}

void to_json(Json& j, const ExpertOutput& o) {
  j = Json{{"expert", o.expert_name},
           {"media", o.media()},
           {"latency_us", o.latency.count()}};
  if (const auto* a = std::get_if<ArtifactRef>(&o.payload)) {
    j["artifact"] = *a;
  } else if (const auto* m = std::get_if<MaskOutput>(&o.payload)) {
    j["mask"] = Json{{"hash", m->hash}, {"grids", m->grids}};
  } else {
    const auto& l = std::get<LayoutOutput>(o.payload);
    Json items = Json::array();
    for (const auto& item : l.items) {
      items.push_back(Json{{"label", item.label}, {"region", item.region}});
    }
    j["layout"] = Json{{"hash", l.hash}, {"items", items}};
  }
}

void from_json(const Json& j, ExpertOutput& o) {
  o.expert_name = FieldOr<std::string>(j, "expert", "");
  o.latency = std::chrono::microseconds(FieldOr<std::int64_t>(j, "latency_us", 0));
  if (j.contains("artifact")) {
    o.payload = Field<ArtifactRef>(j, "artifact");
  } else if (j.contains("mask")) {
    const Json& m = j.at("mask");
    o.payload = MaskOutput{Field<std::string>(m, "hash"),
                           Field<std::vector<BoolGrid>>(m, "grids")};
  } else if (j.contains("layout")) {
    const Json& l = j.at("layout");
    LayoutOutput layout{Field<std::string>(l, "hash"), {}};
    for (const auto& item : Field<Json>(l, "items")) {
      layout.items.push_back(
          {Field<std::string>(item, "label"), Field<Region>(item, "region")});
    }
    o.payload = std::move(layout);
  } else {
    Invalid("expert output needs one of artifact, mask, layout");
  }
}

void to_json(Json& j, const InvocationOutcome& o) {
  j = Json{{"ordinal", o.ordinal}, {"wall_time_us", o.wall_time.count()}};
  if (const auto* out = o.output()) {
    j["status"] = "success";
    j["output"] = *out;
  } else {
    j["status"] = "failure";
    j["error"] = Json{{"code", std::string(FailureCodeName(o.failure()->code))},
                      {"detail", o.failure()->detail}};
  }
}

void from_json(const Json& j, InvocationOutcome& o) {
  o.ordinal = Field<std::size_t>(j, "ordinal");
  o.wall_time = std::chrono::microseconds(FieldOr<std::int64_t>(j, "wall_time_us", 0));
  std::string status = Field<std::string>(j, "status");
  if (status == "success") {
    o.value = Field<ExpertOutput>(j, "output");
  } else if (status == "failure") {
    const Json& err = Field<Json>(j, "error");
    auto code = FailureCodeFromName(Field<std::string>(err, "code"));
    if (!code) Invalid("unknown failure code");
    o.value = Failure{*code, Field<std::string>(err, "detail")};
  } else {
    Invalid("unknown outcome status '" + status + "'");
  }
}

void to_json(Json& j, const ExecutionResult& r) {
  j = Json{{"session_id", r.session_id},
           {"plan_id", r.plan_id},
           {"outcomes", r.outcomes},
           {"total_wall_time_us", r.total_wall_time.count()}};
}

void from_json(const Json& j, ExecutionResult& r) {
  r.session_id = Field<std::string>(j, "session_id");
  r.plan_id = Field<std::string>(j, "plan_id");
  r.outcomes = Field<std::vector<InvocationOutcome>>(j, "outcomes");
  r.total_wall_time =
      std::chrono::microseconds(FieldOr<std::int64_t>(j, "total_wall_time_us", 0));
}

void to_json(Json& j, const ExpertDescriptor& d) {
  j = Json{{"name", d.name}, {"kinds", d.supported_kinds}};
  if (const auto* mock = std::get_if<MockBackend>(&d.backend)) {
    j["backend"] = "mock";
    j["seed"] = mock->seed;
    j["mask_grid"] = mock->mask_grid;
  } else {
    const auto& remote = std::get<RemoteBackend>(d.backend);
    j["backend"] = "remote";
    j["endpoint"] = remote.endpoint;
    j["timeout_ms"] = remote.timeout.count();
    j["max_retries"] = remote.max_retries;
    j["initial_backoff_ms"] = remote.initial_backoff.count();
    j["max_backoff_ms"] = remote.max_backoff.count();
  }
}

void from_json(const Json& j, ExpertDescriptor& d) {
  d.name = Field<std::string>(j, "name");
  d.supported_kinds = Field<std::set<TaskKind>>(j, "kinds");
  std::string backend = Field<std::string>(j, "backend");
  if (backend == "mock") {
    MockBackend mock;
    mock.seed = FieldOr<std::uint64_t>(j, "seed", 0);
    mock.mask_grid = FieldOr<int>(j, "mask_grid", 4);
    if (mock.mask_grid < 1 || mock.mask_grid > 4096) {
      Invalid("mask_grid must be in [1, 4096]");
    }
    d.backend = mock;
  } else if (backend == "remote") {
    RemoteBackend remote;
    remote.endpoint = Field<std::string>(j, "endpoint");
    remote.timeout = std::chrono::milliseconds(FieldOr<std::int64_t>(j, "timeout_ms", 30000));
    remote.max_retries = FieldOr<int>(j, "max_retries", 3);
    remote.initial_backoff =
        std::chrono::milliseconds(FieldOr<std::int64_t>(j, "initial_backoff_ms", 100));
    remote.max_backoff =
        std::chrono::milliseconds(FieldOr<std::int64_t>(j, "max_backoff_ms", 5000));
    if (remote.max_retries < 0 || remote.max_retries > 16) {
      Invalid("max_retries must be in [0, 16]");
    }
    if (remote.timeout.count() <= 0) Invalid("timeout_ms must be positive");
    d.backend = remote;
  } else {
    Invalid("backend must be 'mock' or 'remote'");
  }
}

}  // namespace taskroute
