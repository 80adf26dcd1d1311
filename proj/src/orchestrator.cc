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

#include "taskroute/orchestrator.h"

#include <istream>
#include <utility>

#include "taskroute/artifact.h"
#include "taskroute/error.h"

namespace taskroute {

Transcript ReadTranscriptJsonl(std::istream& in) {
  Transcript t;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::kInvalidInput,
                  "transcript line " + std::to_string(number) + " is not a JSON object");
    }
    std::string session = Field<std::string>(j, "session_id");
    if (t.turns.empty()) {
      t.session_id = session;
    } else if (session != t.session_id) {
      throw Error(ErrorCode::kInvalidInput,
                  "transcript line " + std::to_string(number) + " belongs to session '" +
                      session + "', expected '" + t.session_id + "'");
    }
    t.turns.push_back(Field<std::string>(j, "turn_text"));
  }
  if (t.turns.empty()) throw Error(ErrorCode::kInvalidInput, "transcript has no turns");
  return t;
}

TurnOutcome ProcessTurn(const std::string& text, const SessionContext& ctx,
                        const ExpertRegistry& registry,
                        const DispatchOptions& options) {
  TurnOutcome out;
  out.next = ctx;
  try {
    out.parsed = Parse(text);
  } catch (const ParseError& e) {
    out.error = TurnError{"parse", std::string(ViolationCodeName(ViolationCode::kMalformedToken)),
                          e.detail(), e.offset(),
                          std::string(MalformedReasonName(e.reason()))};
    return out;
  }
  if (auto violations = Validate(*out.parsed); !violations.empty()) {
    const Violation& v = violations.front();
    out.error = TurnError{"validate", std::string(ViolationCodeName(v.code)), v.detail,
                          v.offset, std::nullopt};
    return out;
  }
  try {
    out.plan = Route(*out.parsed, ctx);
  } catch (const Error& e) {
    out.error = TurnError{"route", std::string(ErrorCodeName(e.code())), e.detail(),
                          e.offset() == Error::npos ? std::nullopt
                                                    : std::optional<std::size_t>(e.offset()),
                          std::nullopt};
    return out;
  }
  try {
    out.result = Dispatch(*out.plan, registry, options);
  } catch (const Error& e) {
    out.error = TurnError{"dispatch", std::string(ErrorCodeName(e.code())), e.detail(),
                          std::nullopt, std::nullopt};
    return out;
  }
  out.next = UpdateSession(ctx, TurnRecord{text, *out.plan, *out.result});
  return out;
}

RunReport RunTranscript(const Transcript& t, const Config& config) {
  ArtifactStore store(config.state_dir / "artifacts");
  ExpertRegistry registry = BuildRegistry(config, &store);
  return RunTranscript(t, config, registry);
}

RunReport RunTranscript(const Transcript& t, const Config& config,
                        const ExpertRegistry& registry) {
  RunReport report;
  report.config = ConfigToJson(config);
  report.session_id = t.session_id;

  const DispatchOptions options{config.record_timings};
  SessionContext ctx;
  ctx.session_id = t.session_id;
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    TurnReport turn{i, t.turns[i], ProcessTurn(t.turns[i], ctx, registry, options)};
    if (const auto& result = turn.outcome.result) {
      report.total_wall_time += result->total_wall_time;
      for (const auto& o : result->outcomes) {
        if (const ExpertOutput* output = o.output()) report.expert_latency += output->latency;
      }
    }
    ctx = turn.outcome.next;
    report.turns.push_back(std::move(turn));
  }
  report.final_context = std::move(ctx);
  return report;
}

void to_json(Json& j, const TurnError& e) {
  j = Json{{"stage", e.stage}, {"code", e.code}, {"detail", e.detail}};
  if (e.offset) j["offset"] = *e.offset;
  if (e.reason) j["reason"] = *e.reason;
}

Json TurnOutcomeJson(const TurnOutcome& outcome) {
  Json j = Json::object();
  j["status"] = outcome.error ? "error" : "ok";
  if (outcome.parsed) {
    Json tasks = Json::array();
    std::size_t groundings = 0;
    for (const auto& seg : outcome.parsed->segments) {
      if (const auto* task = seg.task()) tasks.push_back(TaskKindTag(task->kind));
      if (seg.grounding()) ++groundings;
    }
    j["parsed"] = Json{{"segments", outcome.parsed->segments.size()},
                       {"tasks", tasks},
                       {"groundings", groundings}};
  }
  if (outcome.plan) {
    j["plan_id"] = PlanId(*outcome.plan);
    j["plan"] = *outcome.plan;
  }
  if (outcome.result) j["result"] = *outcome.result;
  if (outcome.error) j["error"] = *outcome.error;
  return j;
}

void to_json(Json& j, const RunReport& r) {
  Json turns = Json::array();
  std::size_t invocations = 0;
  std::size_t failed = 0;
  std::size_t errored_turns = 0;
  for (const auto& t : r.turns) {
    Json entry = TurnOutcomeJson(t.outcome);
    entry["turn"] = t.turn;
    entry["text"] = t.text;
    turns.push_back(std::move(entry));
    if (t.outcome.error) ++errored_turns;
    if (const auto& result = t.outcome.result) {
      for (const auto& o : result->outcomes) {
        ++invocations;
        if (!o.ok()) ++failed;
      }
    }
  }
  j = Json{{"config", r.config},
           {"session_id", r.session_id},
           {"turns", turns},
           {"final_context", r.final_context},
           {"summary",
            {{"turns", r.turns.size()},
             {"errored_turns", errored_turns},
             {"invocations", invocations},
             {"failed_invocations", failed},
             {"total_wall_time_us", r.total_wall_time.count()},
             {"expert_latency_us", r.expert_latency.count()}}}};
}

}  // namespace taskroute
