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

#include "taskroute/service.h"

#include <map>
#include <mutex>
#include <optional>
#include <utility>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "taskroute/artifact.h"
#include "taskroute/error.h"
#include "taskroute/hash.h"
#include "taskroute/orchestrator.h"
#include "taskroute/session_store.h"

namespace taskroute {
namespace {

HttpResponse ErrorResponse(int status, const std::string& code, const std::string& detail) {
  return {status, Json{{"error", {{"code", code}, {"detail", detail}}}}};
}

HttpResponse BadRequest(const std::string& detail) {
  return ErrorResponse(400, "BadRequest", detail);
}

struct TextRequest {
  std::string text;
  std::string session_id;
  std::string idempotency_key;
};

// Fills `out` or returns the 400 response describing the problem.
std::optional<HttpResponse> DecodeBody(const std::string& body, bool needs_session,
                                       TextRequest& out) {
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return BadRequest("body must be a JSON object");
  if (!j.contains("text") || !j.at("text").is_string()) {
    return BadRequest("'text' must be a string");
  }
  out.text = j.at("text").get<std::string>();
  if (needs_session) {
    if (!j.contains("session_id") || !j.at("session_id").is_string() ||
        j.at("session_id").get<std::string>().empty()) {
      return BadRequest("'session_id' must be a non-empty string");
    }
    out.session_id = j.at("session_id").get<std::string>();
  }
  if (j.contains("idempotency_key")) {
    if (!j.at("idempotency_key").is_string()) {
      return BadRequest("'idempotency_key' must be a string");
    }
    out.idempotency_key = j.at("idempotency_key").get<std::string>();
  }
  return std::nullopt;
}

HttpResponse TurnErrorResponse(const TurnError& e) {
  Json err = e;
  return {422, Json{{"error", err}}};
}

}  // namespace

struct Service::Impl {
  Impl(Config c, std::optional<ExpertRegistry> custom)
      : config(std::move(c)),
        artifacts(config.state_dir / "artifacts"),
        sessions(config.state_dir / "sessions"),
        registry(custom ? std::move(*custom) : BuildRegistry(config, &artifacts)) {}

  std::shared_ptr<std::mutex> SessionLock(const std::string& id) {
    std::lock_guard<std::mutex> guard(locks_mu);
    auto& lock = locks[id];
    if (!lock) lock = std::make_shared<std::mutex>();
    return lock;
  }

  // Loads or starts a session; CorruptState propagates.
  SessionContext Context(const std::string& id) const {
    if (auto ctx = sessions.Load(id)) return *ctx;
    SessionContext fresh;
    fresh.session_id = id;
    return fresh;
  }

  struct Cached {
    std::string fingerprint;
    HttpResponse response;
  };

  Config config;
  ArtifactStore artifacts;
  SessionStore sessions;
  ExpertRegistry registry;

  std::mutex locks_mu;
  std::map<std::string, std::shared_ptr<std::mutex>> locks;

  std::mutex cache_mu;
  std::map<std::pair<std::string, std::string>, Cached> idempotency_cache;

  httplib::Server server;
};

Service::Service(Config config)
    : impl_(std::make_unique<Impl>(std::move(config), std::nullopt)) {}

Service::Service(Config config, ExpertRegistry registry)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(registry))) {}

Service::~Service() { Stop(); }

HttpResponse Service::HandleParse(const std::string& body) const {
  TextRequest req;
  if (auto bad = DecodeBody(body, false, req)) return *bad;
  try {
    return {200, Json{{"segments", Parse(req.text).segments}}};
  } catch (const ParseError& e) {
    return {422, Json{{"error", ParseErrorJson(e)}}};
  }
}

HttpResponse Service::HandleRoute(const std::string& body) const {
  TextRequest req;
  if (auto bad = DecodeBody(body, true, req)) return *bad;
  SessionContext ctx;
  try {
    ctx = impl_->Context(req.session_id);
  } catch (const Error& e) {
    return ErrorResponse(500, std::string(ErrorCodeName(e.code())), e.detail());
  }
  ParsedMessage msg;
  try {
    msg = Parse(req.text);
  } catch (const ParseError& e) {
    return {422, Json{{"error", ParseErrorJson(e)}}};
  }
  if (auto violations = Validate(msg); !violations.empty()) {
    const Violation& v = violations.front();
    return TurnErrorResponse(
        TurnError{"validate", std::string(ViolationCodeName(v.code)), v.detail, v.offset, {}});
  }
  try {
    RoutingPlan plan = Route(msg, ctx);
    return {200, Json{{"plan_id", PlanId(plan)}, {"plan", plan}}};
  } catch (const Error& e) {
    return ErrorResponse(422, std::string(ErrorCodeName(e.code())), e.detail());
  }
}

HttpResponse Service::HandleExecute(const std::string& body,
                                    const std::string& idempotency_header) {
  TextRequest req;
  if (auto bad = DecodeBody(body, true, req)) return *bad;
  if (!idempotency_header.empty() && !req.idempotency_key.empty() &&
      idempotency_header != req.idempotency_key) {
    return BadRequest("Idempotency-Key header and body field disagree");
  }
  std::string key = idempotency_header.empty() ? req.idempotency_key : idempotency_header;
  std::string fingerprint = Sha256Hex(req.text);

  auto lock = impl_->SessionLock(req.session_id);
  std::lock_guard<std::mutex> session_guard(*lock);

  if (!key.empty()) {
    std::lock_guard<std::mutex> guard(impl_->cache_mu);
    auto it = impl_->idempotency_cache.find({req.session_id, key});
    if (it != impl_->idempotency_cache.end()) {
      if (it->second.fingerprint != fingerprint) {
        return ErrorResponse(422, "IdempotencyConflict",
                             "key was already used with a different request");
      }
      return it->second.response;
    }
  }

  SessionContext ctx;
  try {
    ctx = impl_->Context(req.session_id);
  } catch (const Error& e) {
    return ErrorResponse(500, std::string(ErrorCodeName(e.code())), e.detail());
  }
  TurnOutcome outcome = ProcessTurn(req.text, ctx, impl_->registry,
                                    DispatchOptions{impl_->config.record_timings});
  if (outcome.error) return TurnErrorResponse(*outcome.error);

  Json payload{{"session_id", req.session_id},
               {"turn_index", ctx.turn_index},
               {"plan_id", PlanId(*outcome.plan)},
               {"plan", *outcome.plan},
               {"result", *outcome.result}};
  for (const auto& o : outcome.result->outcomes) {
    const Failure* f = o.failure();
    if (f && f->code == FailureCode::kRemoteTimeout) {
      // Not persisted and not cached, so the client may retry the turn.
      payload["error"] = Json{{"code", FailureCodeName(f->code)}, {"detail", f->detail}};
      return {502, payload};
    }
  }

  try {
    impl_->sessions.Save(outcome.next);
  } catch (const Error& e) {
    return ErrorResponse(500, std::string(ErrorCodeName(e.code())), e.detail());
  }
  HttpResponse response{200, std::move(payload)};
  if (!key.empty()) {
    std::lock_guard<std::mutex> guard(impl_->cache_mu);
    impl_->idempotency_cache[{req.session_id, key}] = {fingerprint, response};
  }
  return response;
}

HttpResponse Service::HandleGetSession(const std::string& session_id) const {
  try {
    auto ctx = impl_->sessions.Load(session_id);
    if (!ctx) return ErrorResponse(404, "UnknownSession", "no session '" + session_id + "'");
    return {200, Json(*ctx)};
  } catch (const Error& e) {
    return ErrorResponse(500, std::string(ErrorCodeName(e.code())), e.detail());
  }
}

int Service::Bind(const std::string& host, int port) {
  auto& server = impl_->server;
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/v1/parse", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, HandleParse(req.body));
  });
  server.Post("/v1/route", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, HandleRoute(req.body));
  });
  server.Post("/v1/execute", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, HandleExecute(req.body, req.get_header_value("Idempotency-Key")));
  });
  server.Get(R"(/v1/sessions/([^/]+))",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, HandleGetSession(req.matches[1]));
             });
  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} -> {}", req.method, req.path, res.status);
  });

  int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void Service::Run() { impl_->server.listen_after_bind(); }

void Service::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace taskroute
