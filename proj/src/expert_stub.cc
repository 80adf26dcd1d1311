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

#include "taskroute/expert_stub.h"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "taskroute/error.h"
#include "taskroute/json_io.h"

namespace taskroute {

struct ExpertStub::Impl {
  explicit Impl(StubOptions o) : options(std::move(o)) {}

  void Handle(const httplib::Request& req, httplib::Response& res) {
    int n = ++requests;
    if (options.delay.count() > 0) std::this_thread::sleep_for(options.delay);
    if (n <= options.fail_first_n) {
      res.status = options.fail_status;
      res.set_content(R"({"error":{"code":"Unavailable","detail":"injected"}})",
                      "application/json");
      return;
    }
    Json j = Json::parse(req.body, nullptr, false);
    ExpertRequest request;
    try {
      if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::kInvalidInput, "body is not a JSON object");
      }
      request.invocation.kind = Field<TaskKind>(j, "kind");
      request.invocation.prompt = Field<std::string>(j, "prompt");
      request.invocation.regions = Field<std::vector<Region>>(j, "regions");
      request.idempotency_key = Field<std::string>(j, "idempotency_key");
      auto slot = InputSlot(request.invocation.kind);
      for (const auto& id : Field<std::vector<std::string>>(j, "input_artifact_ids")) {
        request.inputs.push_back(
            ArtifactRef{id, slot ? SlotMedia(*slot) : MediaKind::kImage});
      }
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(Json{{"error", {{"code", "BadRequest"}, {"detail", e.detail()}}}}.dump(),
                      "application/json");
      return;
    }

    std::lock_guard<std::mutex> guard(mu);
    auto it = replies.find(request.idempotency_key);
    if (it == replies.end()) {
      Json body;
      if (!options.error_prompt.empty() && request.invocation.prompt == options.error_prompt) {
        body = Json{{"error", {{"code", "Refused"}, {"detail", "prompt refused"}}}};
      } else {
        ExpertOutput out = MockExecute(request, options.backend);
        out.expert_name = options.name;
        body = Json{{"output", out}};
      }
      ++executions;
      it = replies.emplace(request.idempotency_key, body.dump()).first;
    }
    res.set_content(it->second, "application/json");
  }

  void Routes() {
    server.Post("/v1/run", [this](const httplib::Request& req, httplib::Response& res) {
      Handle(req, res);
    });
  }

  StubOptions options;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  std::atomic<int> requests{0};
  std::atomic<int> executions{0};
  std::mutex mu;
  std::map<std::string, std::string> replies;
};

ExpertStub::ExpertStub(StubOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->Routes();
}

ExpertStub::~ExpertStub() { Stop(); }

int ExpertStub::Start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->host = host;
  impl_->port = bound;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ExpertStub::Serve(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void ExpertStub::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string ExpertStub::endpoint() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port) + "/v1/run";
}

int ExpertStub::requests() const { return impl_->requests.load(); }
int ExpertStub::executions() const { return impl_->executions.load(); }

}  // namespace taskroute
