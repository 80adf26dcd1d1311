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

#ifndef TASKROUTE_SERVICE_H_
#define TASKROUTE_SERVICE_H_

// HTTP API:
//
//   POST /v1/parse    {"text"}                 -> 200 {"segments": [...]}
//   POST /v1/route    {"text", "session_id"}   -> 200 {"plan_id", "plan"}
//   POST /v1/execute  {"text", "session_id", "idempotency_key"?}
//                                              -> 200 {"session_id",
//                                                 "turn_index", "plan_id",
//                                                 "plan", "result"}
//   GET  /v1/sessions/{id}                     -> 200 SessionContext
//
// Errors carry {"error": {"code", "detail", ...}}: 400 malformed body, 404
// unknown session, 422 parse/validation/routing failures, 502 when a remote
// expert exhausted its retries. Execute also accepts an Idempotency-Key
// header; a repeated key for the same session replays the stored response
// without running any expert.

#include <memory>
#include <string>

#include "taskroute/config.h"
#include "taskroute/expert_registry.h"
#include "taskroute/json_io.h"

namespace taskroute {

struct HttpResponse {
  int status = 200;
  Json body;
};

class Service {
 public:
  // Registry from `config`; sessions and artifacts under config.state_dir.
  explicit Service(Config config);
  Service(Config config, ExpertRegistry registry);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse HandleParse(const std::string& body) const;
  HttpResponse HandleRoute(const std::string& body) const;
  HttpResponse HandleExecute(const std::string& body,
                             const std::string& idempotency_header);
  HttpResponse HandleGetSession(const std::string& session_id) const;

  // Binds the HTTP listener; port 0 picks a free port. Returns the bound
  // port. Throws Error(kIo).
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Requires Bind().
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace taskroute

#endif  // TASKROUTE_SERVICE_H_
