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

#ifndef TASKROUTE_ROUTER_H_
#define TASKROUTE_ROUTER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "taskroute/artifact.h"
#include "taskroute/execution.h"
#include "taskroute/expert_registry.h"
#include "taskroute/json_io.h"
#include "taskroute/plan.h"
#include "taskroute/token_protocol.h"

namespace taskroute {

struct TurnRecord {
  std::string message;
  RoutingPlan plan;
  ExecutionResult result;

  friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

struct SessionContext {
  std::string session_id;
  std::uint64_t turn_index = 0;
  std::map<ArtifactSlot, ArtifactRef> slots;
  std::vector<TurnRecord> history;

  friend bool operator==(const SessionContext&,
                         const SessionContext&) = default;
};

// Builds the plan for one reply. One invocation per task span in lexical
// order. Inputs bind to the session's slots, or to the output of an earlier
// invocation of the same plan that produces the needed media.
//
// Throws Error(kValidationFailed) if Validate(msg) reports violations and
// Error(kMissingArtifact) if a task needs a slot that nothing fills.
RoutingPlan Route(const ParsedMessage& msg, const SessionContext& ctx);

// Throws Error(kNoExpertRegistered).
const ExpertDescriptor& ResolveTask(TaskKind kind, const ExpertRegistry& registry);

// Returns the next context: turn_index + 1, slots overwritten by produced
// image/video/audio artifacts in ordinal order, `turn` appended to history.
// Throws Error(kSessionMismatch) if the result belongs to another session.
SessionContext UpdateSession(const SessionContext& ctx, TurnRecord turn);
SessionContext UpdateSession(const SessionContext& ctx,
                             const ExecutionResult& result);

void to_json(Json& j, const TurnRecord& t);
void from_json(const Json& j, TurnRecord& t);
void to_json(Json& j, const SessionContext& ctx);
void from_json(const Json& j, SessionContext& ctx);

}  // namespace taskroute

#endif  // TASKROUTE_ROUTER_H_
