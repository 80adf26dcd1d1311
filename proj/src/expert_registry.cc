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

#include "taskroute/expert_registry.h"

#include <cstdio>
#include <optional>
#include <utility>

#include "taskroute/error.h"
#include "taskroute/hash.h"
#include "taskroute/remote_expert.h"

namespace taskroute {

MediaKind ExpertOutput::media() const {
  if (const auto* a = std::get_if<ArtifactRef>(&payload)) return a->media;
  if (std::holds_alternative<MaskOutput>(payload)) return MediaKind::kMask;
  return MediaKind::kLayout;
}

const std::string& ExpertOutput::hash() const {
  if (const auto* a = std::get_if<ArtifactRef>(&payload)) return a->hash;
  if (const auto* m = std::get_if<MaskOutput>(&payload)) return m->hash;
  return std::get<LayoutOutput>(payload).hash;
}

std::string_view FailureCodeName(FailureCode code) {
  switch (code) {
    case FailureCode::kExpertError: return "ExpertError";
    case FailureCode::kMockPanic: return "MockPanic";
    case FailureCode::kRemoteTimeout: return "RemoteTimeout";
    case FailureCode::kUpstreamFailed: return "UpstreamFailed";
    case FailureCode::kOutputMismatch: return "OutputMismatch";
  }
  return "ExpertError";
}

std::optional<FailureCode> FailureCodeFromName(std::string_view name) {
  for (FailureCode c : {FailureCode::kExpertError, FailureCode::kMockPanic,
                        FailureCode::kRemoteTimeout, FailureCode::kUpstreamFailed,
                        FailureCode::kOutputMismatch}) {
    if (FailureCodeName(c) == name) return c;
  }
  return std::nullopt;
}

namespace {

std::string ExactNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Canonical byte string the mock output is derived from.
std::string MockDescriptor(const ExpertRequest& request, std::uint64_t seed) {
  const TaskInvocation& inv = request.invocation;
  std::string out = "taskroute-mock/1\n";
  out += "seed=" + std::to_string(seed) + "\n";
  out += "kind=" + std::string(TaskKindName(inv.kind)) + "\n";
  out += "prompt=" + std::to_string(inv.prompt.size()) + ":" + inv.prompt + "\n";
  out += "regions=";
  for (const auto& r : inv.regions) {
    out += "[" + ExactNumber(r.x1) + "," + ExactNumber(r.y1) + "," +
           ExactNumber(r.x2) + "," + ExactNumber(r.y2) + "]";
  }
  out += "\ninputs=";
  for (const auto& a : request.inputs) {
    out += std::string(MediaKindName(a.media)) + ":" + a.hash + ";";
  }
  out += "\n";
  return out;
}

BoolGrid Rasterize(const Region& r, int side) {
  BoolGrid grid{side, side, std::vector<std::uint8_t>(side * side, 0)};
  for (int row = 0; row < side; ++row) {
    double cy = (row + 0.5) / side;
    for (int col = 0; col < side; ++col) {
      double cx = (col + 0.5) / side;
      grid.cells[row * side + col] =
          cx >= r.x1 && cx <= r.x2 && cy >= r.y1 && cy <= r.y2;
    }
  }
  return grid;
}

std::chrono::microseconds SimulatedLatency(const std::string& hash) {
  unsigned long prefix = std::stoul(hash.substr(0, 4), nullptr, 16);
  return std::chrono::microseconds(1000 + prefix % 4000);
}

}  // namespace

ExpertOutput MockExecute(const ExpertRequest& request,
                         const MockBackend& backend,
                         const ArtifactStore* store) {
  const TaskInvocation& inv = request.invocation;
  std::string descriptor = MockDescriptor(request, backend.seed);
  ExpertOutput out;
  out.expert_name = "mock";
  MediaKind media = OutputMedia(inv.kind);
  switch (media) {
    case MediaKind::kImage:
    case MediaKind::kVideo:
    case MediaKind::kAudio: {
      std::string bytes = std::string(MediaKindName(media)) + "\n" + descriptor;
      ArtifactRef ref = store ? store->Put(bytes, media)
                              : ArtifactRef{Sha256Hex(bytes), media};
      out.payload = ref;
      break;
    }
    case MediaKind::kMask: {
      MaskOutput mask;
      std::string bytes = "mask\n" + descriptor;
      for (const auto& r : inv.regions) {
        mask.grids.push_back(Rasterize(r, backend.mask_grid));
        for (auto cell : mask.grids.back().cells) bytes.push_back('0' + cell);
        bytes.push_back('\n');
      }
      mask.hash = store ? store->Put(bytes, media).hash : Sha256Hex(bytes);
      out.payload = std::move(mask);
      break;
    }
    case MediaKind::kLayout: {
      LayoutOutput layout;
      std::string bytes = "layout\n" + descriptor;
      for (const auto& r : inv.regions) layout.items.push_back({inv.prompt, r});
      layout.hash = store ? store->Put(bytes, media).hash : Sha256Hex(bytes);
      out.payload = std::move(layout);
      break;
    }
  }
  out.latency = SimulatedLatency(out.hash());
  return out;
}

ExpertOutput MockExecute(const TaskInvocation& invocation, std::uint64_t seed) {
  ExpertRequest request{invocation, {}, {}};
  for (const auto& b : invocation.inputs) {
    request.inputs.push_back(ArtifactRef{b.hash, b.media});
  }
  return MockExecute(request, MockBackend{seed});
}

ExpertOutput MockExpert::Execute(const ExpertRequest& request) {
  ExpertOutput out = MockExecute(request, backend_, store_);
  out.expert_name = name_;
  return out;
}

void ExpertRegistry::Register(ExpertDescriptor descriptor,
                              std::shared_ptr<Expert> expert,
                              const ArtifactStore* store) {
  if (descriptor.name.empty()) {
    throw Error(ErrorCode::kInvalidDescriptor, "expert name is empty");
  }
  if (descriptor.supported_kinds.empty()) {
    throw Error(ErrorCode::kInvalidDescriptor,
                "expert '" + descriptor.name + "' supports no task kinds");
  }
  for (TaskKind kind : descriptor.supported_kinds) {
    if (auto it = by_kind_.find(kind); it != by_kind_.end()) {
      throw Error(ErrorCode::kDuplicateKind,
                  std::string(TaskKindName(kind)) + " is already served by '" +
                      entries_[it->second].descriptor.name + "'");
    }
  }
  if (!expert) {
    if (const auto* mock = std::get_if<MockBackend>(&descriptor.backend)) {
      expert = std::make_shared<MockExpert>(descriptor.name, *mock, store);
    } else {
      expert = std::make_shared<RemoteExpert>(
          descriptor.name, std::get<RemoteBackend>(descriptor.backend));
    }
  }
  std::size_t index = entries_.size();
  for (TaskKind kind : descriptor.supported_kinds) by_kind_[kind] = index;
  entries_.push_back({std::move(descriptor), std::move(expert)});
}

const ExpertRegistry::Entry* ExpertRegistry::Find(TaskKind kind) const {
  auto it = by_kind_.find(kind);
  return it == by_kind_.end() ? nullptr : &entries_[it->second];
}

std::vector<ExpertDescriptor> DefaultExpertLineup(std::uint64_t seed) {
  MockBackend mock{seed, 4};
  return {
      {"stable-diffusion", {TaskKind::kImageGen}, mock},
      {"gligen-layout", {TaskKind::kLayoutGen}, mock},
      {"instructpix2pix", {TaskKind::kImageEditGlobal}, mock},
      {"gligen-edit", {TaskKind::kImageEditRegion}, mock},
      {"seem", {TaskKind::kImageSeg, TaskKind::kVideoSeg}, mock},
      {"fresco", {TaskKind::kVideoEdit}, mock},
      {"modelscope-t2v", {TaskKind::kVideoGen}, mock},
      {"i2vgen-xl", {TaskKind::kImageToVideo}, mock},
      {"auffusion", {TaskKind::kAudioGen}, mock},
  };
}

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::microseconds Since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() -
                                                               start);
}

// Resolves bindings against earlier outcomes; nullopt + failure on error.
std::optional<std::vector<ArtifactRef>> ResolveInputs(
    const TaskInvocation& inv, const std::vector<InvocationOutcome>& done,
    Failure& failure) {
  std::vector<ArtifactRef> inputs;
  for (const auto& b : inv.inputs) {
    if (!b.from_ordinal) {
      inputs.push_back(ArtifactRef{b.hash, b.media});
      continue;
    }
    std::size_t k = *b.from_ordinal;
    if (k >= done.size()) {
      failure = {FailureCode::kUpstreamFailed,
                 "input refers to invocation " + std::to_string(k) +
                     " which has not run"};
      return std::nullopt;
    }
    const ExpertOutput* upstream = done[k].output();
    if (!upstream) {
      failure = {FailureCode::kUpstreamFailed,
                 "input from invocation " + std::to_string(k) + " failed"};
      return std::nullopt;
    }
    const ArtifactRef* ref = upstream->artifact();
    if (!ref || ref->media != b.media) {
      failure = {FailureCode::kUpstreamFailed,
                 "invocation " + std::to_string(k) + " produced no " +
                     std::string(MediaKindName(b.media))};
      return std::nullopt;
    }
    inputs.push_back(*ref);
  }
  return inputs;
}

}  // namespace

ExecutionResult Dispatch(const RoutingPlan& plan, const ExpertRegistry& registry,
                         const DispatchOptions& options) {
  std::vector<const ExpertRegistry::Entry*> entries;
  for (const auto& inv : plan.invocations) {
    const auto* entry = registry.Find(inv.kind);
    if (!entry) {
      throw Error(ErrorCode::kNoExpertRegistered,
                  "no expert registered for " + std::string(TaskKindName(inv.kind)));
    }
    entries.push_back(entry);
  }

  ExecutionResult result;
  result.session_id = plan.session_id;
  result.plan_id = PlanId(plan);
  auto plan_start = Clock::now();

  for (std::size_t i = 0; i < plan.invocations.size(); ++i) {
    const TaskInvocation& inv = plan.invocations[i];
    const ExpertRegistry::Entry& entry = *entries[i];
    auto start = Clock::now();
    InvocationOutcome outcome;
    outcome.ordinal = inv.ordinal;

    Failure failure;
    auto inputs = ResolveInputs(inv, result.outcomes, failure);
    if (!inputs) {
      outcome.value = failure;
    } else {
      const bool is_mock = std::holds_alternative<MockBackend>(entry.descriptor.backend);
      ExpertRequest request{inv, std::move(*inputs),
                            IdempotencyKey(result.plan_id, inv.ordinal)};
      try {
        ExpertOutput out = entry.expert->Execute(request);
        if (out.media() != OutputMedia(inv.kind)) {
          outcome.value = Failure{
              FailureCode::kOutputMismatch,
              "expected " + std::string(MediaKindName(OutputMedia(inv.kind))) +
                  " output, got " + std::string(MediaKindName(out.media()))};
        } else {
          outcome.value = std::move(out);
        }
      } catch (const ExpertFailure& e) {
        outcome.value = Failure{e.code(), e.what()};
      } catch (const Error& e) {
        FailureCode code = e.code() == ErrorCode::kRemoteTimeout ? FailureCode::kRemoteTimeout
                           : is_mock                             ? FailureCode::kMockPanic
                                                                 : FailureCode::kExpertError;
        outcome.value = Failure{code, e.what()};
      } catch (const std::exception& e) {
        outcome.value = Failure{is_mock ? FailureCode::kMockPanic : FailureCode::kExpertError,
                                e.what()};
      } catch (...) {
        outcome.value = Failure{is_mock ? FailureCode::kMockPanic : FailureCode::kExpertError,
                                "unknown exception"};
      }
    }
    if (options.record_timings) outcome.wall_time = Since(start);
    result.outcomes.push_back(std::move(outcome));
  }
  if (options.record_timings) result.total_wall_time = Since(plan_start);
  return result;
}

}  // namespace taskroute
