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

#ifndef TASKROUTE_JSON_IO_H_
#define TASKROUTE_JSON_IO_H_

// JSON encodings of the core value types. Regions are [x1,y1,x2,y2] arrays,
// enums use their names ("ImageEditRegion", "image", "current_image").
// Decoding validates invariants and throws Error(kInvalidInput) or
// Error(kInvalidRegion).

#include <json.hpp>

#include "taskroute/artifact.h"
#include "taskroute/execution.h"
#include "taskroute/expert_registry.h"
#include "taskroute/plan.h"
#include "taskroute/region.h"
#include "taskroute/task_kind.h"
#include "taskroute/token_protocol.h"

namespace taskroute {

using Json = nlohmann::json;

void to_json(Json& j, TaskKind kind);
void from_json(const Json& j, TaskKind& kind);
void to_json(Json& j, MediaKind media);
void from_json(const Json& j, MediaKind& media);

void to_json(Json& j, const Region& r);
void from_json(const Json& j, Region& r);

void to_json(Json& j, const Segment& s);
void from_json(const Json& j, Segment& s);
void to_json(Json& j, const ParsedMessage& m);
void to_json(Json& j, const Violation& v);
void from_json(const Json& j, Violation& v);
Json ParseErrorJson(const ParseError& e);

void to_json(Json& j, const ArtifactRef& a);
void from_json(const Json& j, ArtifactRef& a);
void to_json(Json& j, const ArtifactBinding& b);
void from_json(const Json& j, ArtifactBinding& b);

void to_json(Json& j, const TaskInvocation& inv);
void from_json(const Json& j, TaskInvocation& inv);
void to_json(Json& j, const RoutingPlan& plan);
void from_json(const Json& j, RoutingPlan& plan);

void to_json(Json& j, const BoolGrid& g);
void from_json(const Json& j, BoolGrid& g);
void to_json(Json& j, const ExpertOutput& o);
void from_json(const Json& j, ExpertOutput& o);
void to_json(Json& j, const InvocationOutcome& o);
void from_json(const Json& j, InvocationOutcome& o);
void to_json(Json& j, const ExecutionResult& r);
void from_json(const Json& j, ExecutionResult& r);

void to_json(Json& j, const ExpertDescriptor& d);
void from_json(const Json& j, ExpertDescriptor& d);

// Typed field access that reports the field name on failure.
template <typename T>
T Field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorCode::kInvalidInput,
                std::string("missing field '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidInput,
                std::string("bad field '") + name + "': " + e.what());
  }
}

template <typename T>
T FieldOr(const Json& j, const char* name, T fallback) {
  if (!j.is_object() || !j.contains(name) || j.at(name).is_null()) {
    return fallback;
  }
  return Field<T>(j, name);
}

}  // namespace taskroute

#endif  // TASKROUTE_JSON_IO_H_
