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

#ifndef TASKROUTE_EXECUTION_H_
#define TASKROUTE_EXECUTION_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "taskroute/artifact.h"
#include "taskroute/region.h"
#include "taskroute/task_kind.h"

namespace taskroute {

// Row-major boolean raster of one region.
struct BoolGrid {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> cells;

  bool at(int row, int col) const { return cells[row * cols + col] != 0; }

  friend bool operator==(const BoolGrid&, const BoolGrid&) = default;
};

// One grid per requested region.
struct MaskOutput {
  std::string hash;
  std::vector<BoolGrid> grids;

  friend bool operator==(const MaskOutput&, const MaskOutput&) = default;
};

struct LayoutItem {
  std::string label;
  Region region;

  friend bool operator==(const LayoutItem&, const LayoutItem&) = default;
};

struct LayoutOutput {
  std::string hash;
  std::vector<LayoutItem> items;

  friend bool operator==(const LayoutOutput&, const LayoutOutput&) = default;
};

struct ExpertOutput {
  std::string expert_name;
  std::variant<ArtifactRef, MaskOutput, LayoutOutput> payload;
  std::chrono::microseconds latency{0};

  MediaKind media() const;
  const ArtifactRef* artifact() const {
    return std::get_if<ArtifactRef>(&payload);
  }
  // Hash identifying the output, whatever its payload type.
  const std::string& hash() const;

  friend bool operator==(const ExpertOutput&, const ExpertOutput&) = default;
};

enum class FailureCode {
  kExpertError,     // the expert reported a semantic failure
  kMockPanic,       // a local expert threw
  kRemoteTimeout,   // transport failures exhausted the retry budget
  kUpstreamFailed,  // an input came from an invocation that failed
  kOutputMismatch,  // the expert returned the wrong media kind
};

std::string_view FailureCodeName(FailureCode code);
std::optional<FailureCode> FailureCodeFromName(std::string_view name);

struct Failure {
  FailureCode code = FailureCode::kExpertError;
  std::string detail;

  friend bool operator==(const Failure&, const Failure&) = default;
};

struct InvocationOutcome {
  std::size_t ordinal = 0;
  std::variant<ExpertOutput, Failure> value;
  // Wall-clock time spent, zero unless timing was requested.
  std::chrono::microseconds wall_time{0};

  bool ok() const { return std::holds_alternative<ExpertOutput>(value); }
  const ExpertOutput* output() const {
    return std::get_if<ExpertOutput>(&value);
  }
  const Failure* failure() const { return std::get_if<Failure>(&value); }

  friend bool operator==(const InvocationOutcome&,
                         const InvocationOutcome&) = default;
};

struct ExecutionResult {
  std::string session_id;
  std::string plan_id;
  std::vector<InvocationOutcome> outcomes;
  std::chrono::microseconds total_wall_time{0};

  friend bool operator==(const ExecutionResult&,
                         const ExecutionResult&) = default;
};

}  // namespace taskroute

#endif  // TASKROUTE_EXECUTION_H_
