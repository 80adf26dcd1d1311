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

#ifndef TASKROUTE_EXPERT_REGISTRY_H_
#define TASKROUTE_EXPERT_REGISTRY_H_

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "taskroute/artifact.h"
#include "taskroute/execution.h"
#include "taskroute/plan.h"

namespace taskroute {

// Deterministic stand-in for a GPU expert.
struct MockBackend {
  std::uint64_t seed = 0;
  int mask_grid = 4;  // side of the square raster used for masks

  friend bool operator==(const MockBackend&, const MockBackend&) = default;
};

// Expert reachable over HTTP; see remote_expert.h for the wire contract.
struct RemoteBackend {
  std::string endpoint;  // e.g. "http://127.0.0.1:9000/v1/run"
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::milliseconds max_backoff{5000};

  friend bool operator==(const RemoteBackend&, const RemoteBackend&) = default;
};

struct ExpertDescriptor {
  std::string name;
  std::set<TaskKind> supported_kinds;
  std::variant<MockBackend, RemoteBackend> backend;

  friend bool operator==(const ExpertDescriptor&,
                         const ExpertDescriptor&) = default;
};

// An invocation with every input resolved to a stored artifact.
struct ExpertRequest {
  TaskInvocation invocation;
  std::vector<ArtifactRef> inputs;
  std::string idempotency_key;
};

// Semantic failure reported by an expert. Never retried.
class ExpertFailure : public std::runtime_error {
 public:
  ExpertFailure(FailureCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}
  FailureCode code() const { return code_; }

 private:
  FailureCode code_;
};

class Expert {
 public:
  virtual ~Expert() = default;

  // Throws ExpertFailure for semantic failures and Error(kRemoteTimeout) when
  // the transport gave up. Anything else thrown counts as a crash.
  virtual ExpertOutput Execute(const ExpertRequest& request) = 0;
};

// Output is a pure function of (seed, kind, prompt, regions, input hashes).
// When `store` is given the synthesized bytes are written to it.
ExpertOutput MockExecute(const ExpertRequest& request,
                         const MockBackend& backend,
                         const ArtifactStore* store = nullptr);

// Convenience for invocations whose inputs are all bound to stored hashes.
ExpertOutput MockExecute(const TaskInvocation& invocation, std::uint64_t seed);

class MockExpert : public Expert {
 public:
  MockExpert(std::string name, MockBackend backend,
             const ArtifactStore* store = nullptr)
      : name_(std::move(name)), backend_(backend), store_(store) {}

  ExpertOutput Execute(const ExpertRequest& request) override;

 private:
  std::string name_;
  MockBackend backend_;
  const ArtifactStore* store_;
};

// Maps each TaskKind to at most one expert. Registration happens before the
// registry is shared; afterwards it is only read, from any thread.
class ExpertRegistry {
 public:
  struct Entry {
    ExpertDescriptor descriptor;
    std::shared_ptr<Expert> expert;
  };

  // Backs `descriptor` with `expert`, or with a MockExpert / RemoteExpert
  // built from its backend when null. Throws Error(kInvalidDescriptor) for an
  // empty name or kind set, Error(kDuplicateKind) if a kind is taken.
  void Register(ExpertDescriptor descriptor,
                std::shared_ptr<Expert> expert = nullptr,
                const ArtifactStore* store = nullptr);

  // nullptr when nothing serves `kind`.
  const Entry* Find(TaskKind kind) const;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::map<TaskKind, std::size_t> by_kind_;
};

// The expert lineup used by default: generation, editing, segmentation,
// video and audio experts, all backed by mocks with the given seed.
std::vector<ExpertDescriptor> DefaultExpertLineup(std::uint64_t seed = 0);

struct DispatchOptions {
  bool record_timings = false;
};

// Runs the plan's invocations in order. Throws Error(kNoExpertRegistered)
// before running anything if some kind is unserved; every other failure is
// recorded as that invocation's outcome. An invocation whose input comes
// from a failed invocation is not attempted.
ExecutionResult Dispatch(const RoutingPlan& plan, const ExpertRegistry& registry,
                         const DispatchOptions& options = {});

}  // namespace taskroute

#endif  // TASKROUTE_EXPERT_REGISTRY_H_
