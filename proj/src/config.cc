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

#include "taskroute/config.h"

#include <charconv>
#include <cstdlib>
#include <set>

#include "taskroute/error.h"

namespace taskroute {
namespace {

const std::set<std::string> kLogLevels = {"trace", "debug", "info", "warn",
                                          "error", "critical", "off"};

void CheckLogLevel(const std::string& level) {
  if (!kLogLevels.count(level)) {
    throw Error(ErrorCode::kInvalidConfig, "unknown log level '" + level + "'");
  }
}

}  // namespace

std::optional<std::string> ProcessEnv(const char* name) {
  const char* value = std::getenv(name);
  if (!value || !*value) return std::nullopt;
  return std::string(value);
}

Config ConfigFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  static const std::set<std::string> known = {"experts", "state_dir", "listen",
                                              "log_level", "record_timings"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }
  Config c;
  try {
    if (j.contains("experts")) {
      c.experts = Field<std::vector<ExpertDescriptor>>(j, "experts");
    }
    c.state_dir = FieldOr<std::string>(j, "state_dir", c.state_dir.string());
    c.listen = FieldOr<std::string>(j, "listen", c.listen);
    c.log_level = FieldOr<std::string>(j, "log_level", c.log_level);
    c.record_timings = FieldOr<bool>(j, "record_timings", c.record_timings);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.detail());
  }
  CheckLogLevel(c.log_level);
  ParseListen(c.listen);
  // Surfaces duplicate kinds and bad endpoints at load time.
  BuildRegistry(c);
  return c;
}

Json ConfigToJson(const Config& config) {
  return Json{{"experts", config.experts},
              {"state_dir", config.state_dir.string()},
              {"listen", config.listen},
              {"log_level", config.log_level},
              {"record_timings", config.record_timings}};
}

Config LoadConfig(const std::optional<std::filesystem::path>& file,
                  const ConfigOverrides& flags, const EnvLookup& env) {
  Config c;
  if (file) {
    Json j = Json::parse(ReadFile(*file), nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kInvalidConfig, file->string() + " is not valid JSON");
    }
    c = ConfigFromJson(j);
  }
  if (auto v = env("TASKROUTE_STATE_DIR")) c.state_dir = *v;
  if (auto v = env("TASKROUTE_LISTEN")) c.listen = *v;
  if (auto v = env("TASKROUTE_LOG_LEVEL")) c.log_level = *v;
  if (flags.state_dir) c.state_dir = *flags.state_dir;
  if (flags.listen) c.listen = *flags.listen;
  if (flags.log_level) c.log_level = *flags.log_level;
  CheckLogLevel(c.log_level);
  ParseListen(c.listen);
  return c;
}

ListenAddress ParseListen(const std::string& listen) {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::kInvalidConfig, "listen must be host:port, got '" + listen + "'");
  }
  ListenAddress addr{listen.substr(0, colon), 0};
  const char* first = listen.data() + colon + 1;
  const char* last = listen.data() + listen.size();
  auto [ptr, ec] = std::from_chars(first, last, addr.port);
  if (ec != std::errc() || ptr != last || first == last || addr.port < 0 ||
      addr.port > 65535) {
    throw Error(ErrorCode::kInvalidConfig, "bad port in '" + listen + "'");
  }
  return addr;
}

ExpertRegistry BuildRegistry(const Config& config, const ArtifactStore* store) {
  ExpertRegistry registry;
  for (const auto& d : config.experts) registry.Register(d, nullptr, store);
  return registry;
}

}  // namespace taskroute
