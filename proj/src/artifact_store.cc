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

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "taskroute/artifact.h"
#include "taskroute/error.h"
#include "taskroute/hash.h"

namespace taskroute {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return buf.str();
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view data) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id() << "." << counter++;
  std::filesystem::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

ArtifactStore::ArtifactStore(std::filesystem::path root)
    : root_(std::move(root)) {}

namespace {

bool IsDigest(std::string_view hash) {
  if (hash.size() != 64) return false;
  for (char c : hash) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::filesystem::path ArtifactStore::PathFor(std::string_view hash) const {
  std::string h(hash);
  return root_ / h.substr(0, 2) / h;
}

ArtifactRef ArtifactStore::Put(std::string_view bytes, MediaKind media) const {
  ArtifactRef ref{Sha256Hex(bytes), media};
  std::filesystem::path path = PathFor(ref.hash);
  if (!std::filesystem::exists(path)) WriteFileAtomic(path, bytes);
  return ref;
}

std::optional<std::string> ArtifactStore::Get(std::string_view hash) const {
  if (!IsDigest(hash)) return std::nullopt;
  std::filesystem::path path = PathFor(hash);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::string bytes = ReadFile(path);
  if (Sha256Hex(bytes) != hash) {
    throw Error(ErrorCode::kCorruptState, "artifact " + std::string(hash) +
                                              " does not match its hash");
  }
  return bytes;
}

bool ArtifactStore::Contains(std::string_view hash) const {
  return IsDigest(hash) && std::filesystem::exists(PathFor(hash));
}

}  // namespace taskroute
