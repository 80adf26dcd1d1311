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

#include "taskroute/remote_expert.h"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <thread>

namespace taskroute {

std::chrono::milliseconds BackoffPolicy::Delay(int retry) const {
  double ms = static_cast<double>(initial.count()) *
              std::pow(multiplier, std::max(0, retry));
  ms = std::min(ms, static_cast<double>(max.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

EndpointUrl ParseEndpointUrl(const std::string& url) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0 || url.size() == kScheme.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "endpoint must be http://host[:port][/path]: '" + url + "'");
  }
  std::size_t slash = url.find('/', kScheme.size());
  EndpointUrl out;
  out.origin = url.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : url.substr(slash);
  return out;
}

Json RemoteRequestJson(const ExpertRequest& request) {
  std::vector<std::string> ids;
  for (const auto& a : request.inputs) ids.push_back(a.hash);
  return Json{{"kind", request.invocation.kind},
              {"prompt", request.invocation.prompt},
              {"regions", request.invocation.regions},
              {"input_artifact_ids", ids},
              {"idempotency_key", request.idempotency_key}};
}

ExpertOutput ParseRemoteResponse(const std::string& body, TaskKind kind) {
  Json j = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ExpertFailure(FailureCode::kExpertError, "response is not JSON");
  }
  if (j.contains("error")) {
    const Json& err = j.at("error");
    std::string code = err.is_object() ? err.value("code", "error") : "error";
    std::string detail = err.is_object() ? err.value("detail", "") : "";
    throw ExpertFailure(FailureCode::kExpertError, code + ": " + detail);
  }
  if (!j.contains("output")) {
    throw ExpertFailure(FailureCode::kExpertError, "response has no output");
  }
  ExpertOutput out;
  try {
    out = j.at("output").get<ExpertOutput>();
  } catch (const std::exception& e) {
    throw ExpertFailure(FailureCode::kExpertError,
                        std::string("bad output: ") + e.what());
  }
  if (out.media() != OutputMedia(kind)) {
    throw ExpertFailure(FailureCode::kOutputMismatch,
                        "expected " + std::string(MediaKindName(OutputMedia(kind))) +
                            " output, got " + std::string(MediaKindName(out.media())));
  }
  return out;
}

RemoteExpert::RemoteExpert(std::string name, RemoteBackend backend,
                           Sleeper sleeper)
    : name_(std::move(name)),
      backend_(std::move(backend)),
      url_(ParseEndpointUrl(backend_.endpoint)),
      sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

ExpertOutput RemoteExpert::Execute(const ExpertRequest& request) {
  httplib::Client client(url_.origin);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(backend_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      backend_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  const std::string body = RemoteRequestJson(request).dump();
  const httplib::Headers headers = {{"Idempotency-Key", request.idempotency_key}};
  const BackoffPolicy backoff{backend_.initial_backoff, backend_.max_backoff};

  std::string last_error;
  const int attempts = 1 + std::max(0, backend_.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) sleeper_(backoff.Delay(attempt - 1));
    last_attempts_ = attempt + 1;
    auto started = std::chrono::steady_clock::now();
    auto res = client.Post(url_.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    int status = res->status;
    if (status == 429 || status == 502 || status == 503 || status == 504) {
      last_error = "HTTP " + std::to_string(status);
      continue;
    }
    if (status != 200) {
      throw ExpertFailure(FailureCode::kExpertError,
                          "HTTP " + std::to_string(status) + ": " + res->body);
    }
    ExpertOutput out = ParseRemoteResponse(res->body, request.invocation.kind);
    out.expert_name = name_;
    if (out.latency.count() == 0) {
      out.latency = std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - started);
    }
    return out;
  }
  throw Error(ErrorCode::kRemoteTimeout,
              name_ + " gave up after " + std::to_string(attempts) +
                  " attempts; last error: " + last_error);
}

}  // namespace taskroute
