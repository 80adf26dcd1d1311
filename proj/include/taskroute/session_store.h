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

#ifndef TASKROUTE_SESSION_STORE_H_
#define TASKROUTE_SESSION_STORE_H_

// Session persistence. Each save writes an immutable snapshot
//
//   <dir>/objects/<sha256 of file>.json =
//       {"version": 1, "checksum": sha256(context json), "context": {...}}
//
// and then repoints <dir>/heads/<sha256(session id)[:32]> at it. Both writes
// are atomic renames, so a reader sees either the old or the new snapshot.

#include <filesystem>
#include <optional>
#include <string>

#include "taskroute/router.h"

namespace taskroute {

inline constexpr int kSessionSnapshotVersion = 1;

class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  // Returns the snapshot hash. Throws Error(kIo).
  std::string Save(const SessionContext& ctx) const;

  // nullopt if the session was never saved. Throws Error(kCorruptState) when
  // the head, the snapshot bytes or the context checksum do not verify.
  std::optional<SessionContext> Load(const std::string& session_id) const;

  bool Contains(const std::string& session_id) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path HeadPath(const std::string& session_id) const;

  std::filesystem::path dir_;
};

}  // namespace taskroute

#endif  // TASKROUTE_SESSION_STORE_H_
