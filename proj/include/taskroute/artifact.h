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

#ifndef TASKROUTE_ARTIFACT_H_
#define TASKROUTE_ARTIFACT_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "taskroute/task_kind.h"

namespace taskroute {

// Content hash (hex SHA-256 of the artifact bytes) plus its media kind.
struct ArtifactRef {
  std::string hash;
  MediaKind media = MediaKind::kImage;

  friend bool operator==(const ArtifactRef&, const ArtifactRef&) = default;
};

// An input of a task invocation. Either an artifact that already exists
// (`hash` set) or the output of an earlier invocation in the same plan
// (`from_ordinal` set, resolved at dispatch time).
struct ArtifactBinding {
  MediaKind media = MediaKind::kImage;
  std::string hash;
  std::optional<std::size_t> from_ordinal;

  friend bool operator==(const ArtifactBinding&,
                         const ArtifactBinding&) = default;
};

// Content-addressed blob store on a directory: <root>/<hh>/<hash>.
// Writes go through a temp file and rename, so concurrent writers of the same
// content are safe.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);

  ArtifactRef Put(std::string_view bytes, MediaKind media) const;
  std::optional<std::string> Get(std::string_view hash) const;
  bool Contains(std::string_view hash) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path PathFor(std::string_view hash) const;

  std::filesystem::path root_;
};

// Reads a whole file; throws Error(kIo) on failure.
std::string ReadFile(const std::filesystem::path& path);

// Writes via "<path>.tmp.<unique>" and rename; throws Error(kIo) on failure.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

}  // namespace taskroute

#endif  // TASKROUTE_ARTIFACT_H_
