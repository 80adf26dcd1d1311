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

#ifndef TASKROUTE_ORCHESTRATOR_H_
#define TASKROUTE_ORCHESTRATOR_H_

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "taskroute/config.h"
#include "taskroute/expert_registry.h"
#include "taskroute/json_io.h"
#include "taskroute/router.h"
#include "taskroute/token_protocol.h"

namespace taskroute {

// Precomputed model replies for one session, in order.
struct Transcript {
  std::string session_id;
  std::vector<std::string> turns;
};

// One {"session_id", "turn_text"} object per line, all for the same session.
// Throws Error(kInvalidInput) on mixed sessions or no turns.
Transcript ReadTranscriptJsonl(std::istream& in);

struct TurnError {
  std::string stage;  // "parse", "validate", "route" or "dispatch"
  std::string code;   // violation or error code name
  std::string detail;
  std::optional<std::size_t> offset;
  std::optional<std::string> reason;  // parse errors only

  friend bool operator==(const TurnError&, const TurnError&) = default;
};

struct TurnOutcome {
  std::optional<ParsedMessage> parsed;
  std::optional<RoutingPlan> plan;
  std::optional<ExecutionResult> result;
  std::optional<TurnError> error;
  // Context after the turn; unchanged when the turn failed before dispatch.
  SessionContext next;
};

// parse -> validate -> route -> dispatch -> update for a single reply. Never
// throws for problems in `text`; they land in TurnOutcome::error.
TurnOutcome ProcessTurn(const std::string& text, const SessionContext& ctx,
                        const ExpertRegistry& registry,
                        const DispatchOptions& options = {});

struct TurnReport {
  std::size_t turn = 0;
  std::string text;
  TurnOutcome outcome;
};

struct RunReport {
  Json config;  // effective configuration
  std::string session_id;
  std::vector<TurnReport> turns;
  SessionContext final_context;
  std::chrono::microseconds total_wall_time{0};
  std::chrono::microseconds expert_latency{0};
};

// Replays `t` through a fresh context. Only configuration errors throw.
RunReport RunTranscript(const Transcript& t, const Config& config);
// Same, with a caller-supplied registry.
RunReport RunTranscript(const Transcript& t, const Config& config,
                        const ExpertRegistry& registry);

void to_json(Json& j, const TurnError& e);
Json TurnOutcomeJson(const TurnOutcome& outcome);
void to_json(Json& j, const RunReport& r);

}  // namespace taskroute

#endif  // TASKROUTE_ORCHESTRATOR_H_
