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

#include "taskroute/session_store.h"

#include <utility>

#include "taskroute/error.h"
#include "taskroute/hash.h"

namespace taskroute {
namespace {

bool IsDigest(const std::string& s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

[[noreturn]] void Corrupt(const std::string& session_id, const std::string& why) {
  throw Error(ErrorCode::kCorruptState, "session '" + session_id + "': " + why);
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path SessionStore::HeadPath(const std::string& session_id) const {
  return dir_ / "heads" / Sha256Hex(session_id).substr(0, 32);
}

std::string SessionStore::Save(const SessionContext& ctx) const {
  Json context = ctx;
  Json snapshot{{"version", kSessionSnapshotVersion},
                {"checksum", Sha256Hex(context.dump())},
                {"context", std::move(context)}};
  std::string bytes = snapshot.dump();
  std::string hash = Sha256Hex(bytes);

  std::error_code ec;
  std::filesystem::create_directories(dir_ / "objects", ec);
  std::filesystem::create_directories(dir_ / "heads", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir_.string());

  auto object = dir_ / "objects" / (hash + ".json");
  if (!std::filesystem::exists(object)) WriteFileAtomic(object, bytes);
  WriteFileAtomic(HeadPath(ctx.session_id), hash);
  return hash;
}

std::optional<SessionContext> SessionStore::Load(const std::string& session_id) const {
  auto head = HeadPath(session_id);
  if (!std::filesystem::exists(head)) return std::nullopt;

  std::string hash = ReadFile(head);
  if (!IsDigest(hash)) Corrupt(session_id, "head is damaged");
  auto object = dir_ / "objects" / (hash + ".json");
  if (!std::filesystem::exists(object)) Corrupt(session_id, "snapshot is missing");
  std::string bytes = ReadFile(object);
  if (Sha256Hex(bytes) != hash) Corrupt(session_id, "snapshot bytes do not match");

  Json snapshot = Json::parse(bytes, nullptr, false);
  if (snapshot.is_discarded() || !snapshot.is_object() ||
      !snapshot.contains("context") || !snapshot.contains("checksum")) {
    Corrupt(session_id, "snapshot is not a valid document");
  }
  if (snapshot.value("version", 0) != kSessionSnapshotVersion) {
    Corrupt(session_id, "unsupported snapshot version");
  }
  const Json& context = snapshot.at("context");
  if (!snapshot.at("checksum").is_string() ||
      Sha256Hex(context.dump()) != snapshot.at("checksum").get<std::string>()) {
    Corrupt(session_id, "context checksum mismatch");
  }
  SessionContext ctx;
  try {
    ctx = context.get<SessionContext>();
  } catch (const std::exception& e) {
    Corrupt(session_id, e.what());
  }
  if (ctx.session_id != session_id) Corrupt(session_id, "snapshot belongs to another session");
  return ctx;
}

bool SessionStore::Contains(const std::string& session_id) const {
  return std::filesystem::exists(HeadPath(session_id));
}

}  // namespace taskroute
