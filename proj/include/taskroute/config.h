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

#ifndef TASKROUTE_CONFIG_H_
#define TASKROUTE_CONFIG_H_

// Configuration file (JSON):
//
//   {
//     "experts": [<ExpertDescriptor json>, ...],   // default lineup if absent
//     "state_dir": "taskroute-state",
//     "listen": "127.0.0.1:8080",
//     "log_level": "info",
//     "record_timings": false
//   }
//
// Precedence: command-line flags, then TASKROUTE_STATE_DIR /
// TASKROUTE_LISTEN / TASKROUTE_LOG_LEVEL, then the file, then defaults.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "taskroute/artifact.h"
#include "taskroute/expert_registry.h"
#include "taskroute/json_io.h"

namespace taskroute {

struct Config {
  std::vector<ExpertDescriptor> experts = DefaultExpertLineup();
  std::filesystem::path state_dir = "taskroute-state";
  std::string listen = "127.0.0.1:8080";
  std::string log_level = "info";
  bool record_timings = false;

  friend bool operator==(const Config&, const Config&) = default;
};

struct ConfigOverrides {
  std::optional<std::filesystem::path> state_dir;
  std::optional<std::string> listen;
  std::optional<std::string> log_level;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

// Reads the process environment.
std::optional<std::string> ProcessEnv(const char* name);

// Throws Error(kInvalidConfig) for unknown keys, bad values or an invalid
// expert list.
Config ConfigFromJson(const Json& j);
Json ConfigToJson(const Config& config);

// `file` may be empty, in which case only defaults, env and flags apply.
Config LoadConfig(const std::optional<std::filesystem::path>& file,
                  const ConfigOverrides& flags = {},
                  const EnvLookup& env = ProcessEnv);

struct ListenAddress {
  std::string host;
  int port = 0;
};

// "host:port"; throws Error(kInvalidConfig).
ListenAddress ParseListen(const std::string& listen);

// Registers every configured expert. Mock experts write their outputs to
// `store` when given. Throws what ExpertRegistry::Register throws.
ExpertRegistry BuildRegistry(const Config& config,
                             const ArtifactStore* store = nullptr);

}  // namespace taskroute

#endif  // TASKROUTE_CONFIG_H_
