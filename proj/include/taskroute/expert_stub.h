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

#ifndef TASKROUTE_EXPERT_STUB_H_
#define TASKROUTE_EXPERT_STUB_H_

// A local HTTP server speaking the remote expert contract (remote_expert.h)
// and answering with mock outputs. Requests are deduplicated by idempotency
// key. Used by tests and `taskroute expert-stub`.

#include <chrono>
#include <memory>
#include <string>

#include "taskroute/expert_registry.h"

namespace taskroute {

struct StubOptions {
  MockBackend backend;
  std::string name = "stub";
  int fail_first_n = 0;   // first N requests get `fail_status`
  int fail_status = 503;
  std::chrono::milliseconds delay{0};  // added before answering
  std::string error_prompt;  // prompt answered with a semantic error body
};

class ExpertStub {
 public:
  explicit ExpertStub(StubOptions options);
  ~ExpertStub();

  ExpertStub(const ExpertStub&) = delete;
  ExpertStub& operator=(const ExpertStub&) = delete;

  // Serves on a background thread; port 0 picks a free port. Returns the
  // bound port. Throws Error(kIo).
  int Start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until Stop().
  void Serve(const std::string& host, int port);
  void Stop();

  // "http://host:port/v1/run" once started.
  std::string endpoint() const;

  int requests() const;    // every POST received
  int executions() const;  // mock runs, excluding replays and failures

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace taskroute

#endif  // TASKROUTE_EXPERT_STUB_H_
