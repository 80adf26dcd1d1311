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

#ifndef TASKROUTE_PLAN_H_
#define TASKROUTE_PLAN_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "taskroute/artifact.h"
#include "taskroute/region.h"
#include "taskroute/task_kind.h"

namespace taskroute {

struct TaskInvocation {
  TaskKind kind = TaskKind::kImageGen;
  std::string prompt;
  std::vector<Region> regions;
  std::vector<ArtifactBinding> inputs;
  std::size_t ordinal = 0;

  friend bool operator==(const TaskInvocation&,
                         const TaskInvocation&) = default;
};

struct RoutingPlan {
  std::string session_id;
  std::uint64_t turn_index = 0;
  std::vector<TaskInvocation> invocations;
  std::string passthrough_text;
  // Grounding tokens not attached to any task, e.g. a referring answer.
  std::vector<Region> standalone_regions;

  friend bool operator==(const RoutingPlan&, const RoutingPlan&) = default;
};

// Stable identifier: first 16 hex digits of SHA-256 over the plan's JSON.
std::string PlanId(const RoutingPlan& plan);

// Key a remote expert uses to deduplicate retried requests.
std::string IdempotencyKey(const std::string& plan_id, std::size_t ordinal);

}  // namespace taskroute

#endif  // TASKROUTE_PLAN_H_
