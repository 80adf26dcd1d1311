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

#ifndef TASKROUTE_REMOTE_EXPERT_H_
#define TASKROUTE_REMOTE_EXPERT_H_

// HTTP contract for remote experts.
//
// Request: POST <endpoint>, header "Idempotency-Key: <key>", body
//   {"kind": "ImageSeg", "prompt": "...", "regions": [[x1,y1,x2,y2], ...],
//    "input_artifact_ids": ["<sha256>", ...], "idempotency_key": "<key>"}
//
// Response 200: {"output": <ExpertOutput json>} on success, or
//   {"error": {"code": "...", "detail": "..."}} for a semantic failure.
//
// Transport errors (no response) and HTTP 429/502/503/504 are retried with
// exponential backoff up to max_retries extra attempts. Any other status and
// any error body is final.

#include <atomic>
#include <chrono>
#include <functional>
#include <string>

#include "taskroute/expert_registry.h"
#include "taskroute/json_io.h"

namespace taskroute {

struct BackoffPolicy {
  std::chrono::milliseconds initial{100};
  std::chrono::milliseconds max{5000};
  double multiplier = 2.0;

  // Delay before retry number `retry` (0-based): initial * multiplier^retry,
  // capped at max.
  std::chrono::milliseconds Delay(int retry) const;
};

struct EndpointUrl {
  std::string origin;  // "http://host:port"
  std::string path;    // "/v1/run"
};

// Throws Error(kInvalidConfig) unless `url` is http://host[:port][/path].
EndpointUrl ParseEndpointUrl(const std::string& url);

Json RemoteRequestJson(const ExpertRequest& request);

// Decodes a response body. Throws ExpertFailure for error bodies, malformed
// JSON, or an output whose media kind does not match `kind`.
ExpertOutput ParseRemoteResponse(const std::string& body, TaskKind kind);

class RemoteExpert : public Expert {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  RemoteExpert(std::string name, RemoteBackend backend, Sleeper sleeper = {});

  ExpertOutput Execute(const ExpertRequest& request) override;

  // Attempts made by the most recent Execute call.
  int last_attempts() const { return last_attempts_.load(); }

 private:
  std::string name_;
  RemoteBackend backend_;
  EndpointUrl url_;
  Sleeper sleeper_;
  std::atomic<int> last_attempts_{0};
};

}  // namespace taskroute

#endif  // TASKROUTE_REMOTE_EXPERT_H_
