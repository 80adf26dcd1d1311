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

#include "taskroute/router.h"

#include <optional>
#include <utility>

#include "taskroute/error.h"
#include "taskroute/hash.h"

namespace taskroute {

std::string PlanId(const RoutingPlan& plan) {
  return Sha256Hex(Json(plan).dump()).substr(0, 16);
}

std::string IdempotencyKey(const std::string& plan_id, std::size_t ordinal) {
  return Sha256Hex(plan_id + ":" + std::to_string(ordinal));
}

RoutingPlan Route(const ParsedMessage& msg, const SessionContext& ctx) {
  std::vector<Violation> violations = Validate(msg);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw Error(ErrorCode::kValidationFailed,
                std::string(ViolationCodeName(v.code)) + ": " + v.detail,
                v.offset);
  }

  RoutingPlan plan;
  plan.session_id = ctx.session_id;
  plan.turn_index = ctx.turn_index;

  RegionBinding binding = BindRegions(msg.segments);
  plan.standalone_regions = binding.standalone;

  // Latest producer of each slot within this plan.
  std::map<ArtifactSlot, std::size_t> produced;
  std::size_t task_index = 0;
  for (const auto& seg : msg.segments) {
    if (const auto* text = seg.text()) {
      plan.passthrough_text += text->content;
      continue;
    }
    const auto* task = seg.task();
    if (!task) continue;

    TaskInvocation inv;
    inv.kind = task->kind;
    inv.prompt = task->payload;
    inv.regions = binding.task_regions[task_index++];
    inv.ordinal = plan.invocations.size();

    if (auto slot = InputSlot(task->kind)) {
      ArtifactBinding input;
      input.media = SlotMedia(*slot);
      if (auto p = produced.find(*slot); p != produced.end()) {
        input.from_ordinal = p->second;
      } else if (auto s = ctx.slots.find(*slot); s != ctx.slots.end()) {
        input.hash = s->second.hash;
      } else {
        throw Error(ErrorCode::kMissingArtifact,
                    std::string(TaskKindName(task->kind)) + " needs " +
                        std::string(ArtifactSlotName(*slot)) +
                        " but the session has none",
                    seg.span.offset);
      }
      inv.inputs.push_back(std::move(input));
    }
    if (auto out = SlotForMedia(OutputMedia(task->kind))) {
      produced[*out] = inv.ordinal;
    }
    plan.invocations.push_back(std::move(inv));
  }
  return plan;
}

const ExpertDescriptor& ResolveTask(TaskKind kind,
                                    const ExpertRegistry& registry) {
  const auto* entry = registry.Find(kind);
  if (!entry) {
    throw Error(ErrorCode::kNoExpertRegistered,
                "no expert registered for " + std::string(TaskKindName(kind)));
  }
  return entry->descriptor;
}

SessionContext UpdateSession(const SessionContext& ctx, TurnRecord turn) {
  if (turn.result.session_id != ctx.session_id) {
    throw Error(ErrorCode::kSessionMismatch,
                "result for session '" + turn.result.session_id +
                    "' applied to session '" + ctx.session_id + "'");
  }
  SessionContext next = ctx;
  next.turn_index = ctx.turn_index + 1;
  for (const auto& outcome : turn.result.outcomes) {
    const ExpertOutput* out = outcome.output();
    if (!out) continue;
    const ArtifactRef* ref = out->artifact();
    if (!ref) continue;
    if (auto slot = SlotForMedia(ref->media)) next.slots[*slot] = *ref;
  }
  next.history.push_back(std::move(turn));
  return next;
}

SessionContext UpdateSession(const SessionContext& ctx,
                             const ExecutionResult& result) {
  TurnRecord turn;
  turn.plan.session_id = result.session_id;
  turn.plan.turn_index = ctx.turn_index;
  turn.result = result;
  return UpdateSession(ctx, std::move(turn));
}

void to_json(Json& j, const TurnRecord& t) {
  j = Json{{"message", t.message}, {"plan", t.plan}, {"result", t.result}};
}

void from_json(const Json& j, TurnRecord& t) {
  t.message = Field<std::string>(j, "message");
  t.plan = Field<RoutingPlan>(j, "plan");
  t.result = Field<ExecutionResult>(j, "result");
}

void to_json(Json& j, const SessionContext& ctx) {
  Json slots = Json::object();
  for (const auto& [slot, ref] : ctx.slots) {
    slots[std::string(ArtifactSlotName(slot))] = ref;
  }
  j = Json{{"session_id", ctx.session_id},
           {"turn_index", ctx.turn_index},
           {"artifact_slots", slots},
           {"history", ctx.history}};
}

void from_json(const Json& j, SessionContext& ctx) {
  ctx.session_id = Field<std::string>(j, "session_id");
  ctx.turn_index = Field<std::uint64_t>(j, "turn_index");
  ctx.slots.clear();
  const Json slots = Field<Json>(j, "artifact_slots");
  for (auto it = slots.begin(); it != slots.end(); ++it) {
    auto slot = ArtifactSlotFromName(it.key());
    if (!slot) {
      throw Error(ErrorCode::kInvalidInput, "unknown artifact slot '" + it.key() + "'");
    }
    ctx.slots[*slot] = it.value().get<ArtifactRef>();
  }
  ctx.history = Field<std::vector<TurnRecord>>(j, "history");
}

}  // namespace taskroute
