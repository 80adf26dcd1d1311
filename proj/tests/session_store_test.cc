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

#include <fstream>

#include <gtest/gtest.h>

#include "taskroute/error.h"
#include "taskroute/hash.h"
#include "test_util.h"

namespace taskroute {
namespace {

SessionContext ThreeTurns() {
  SessionContext ctx{"demo"};
  ExpertRegistry registry;
  for (auto& d : DefaultExpertLineup()) registry.Register(d);
  for (const char* text : {"<Gen>a cat</Gen>", "<VideoGen>waves</VideoGen>", "just text"}) {
    ParsedMessage msg = Parse(text);
    RoutingPlan plan = Route(msg, ctx);
    ctx = UpdateSession(ctx, TurnRecord{text, plan, Dispatch(plan, registry)});
  }
  return ctx;
}

ErrorCode LoadCode(const SessionStore& store, const std::string& id) {
  try {
    store.Load(id);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

std::filesystem::path OnlyObject(const SessionStore& store) {
  std::filesystem::path found;
  for (const auto& e : std::filesystem::directory_iterator(store.dir() / "objects")) found = e.path();
  return found;
}

TEST(SessionStoreTest, FreshContextRoundTrips) {
  testing::TempDir dir;
  SessionStore store(dir.path());
  SessionContext ctx{"fresh"};
  store.Save(ctx);
  EXPECT_EQ(store.Load("fresh"), ctx);
}

TEST(SessionStoreTest, ThreeTurnsTwoArtifactsRoundTrip) {
  testing::TempDir dir;
  SessionStore store(dir.path());
  SessionContext ctx = ThreeTurns();
  ASSERT_EQ(ctx.history.size(), 3u);
  ASSERT_EQ(ctx.slots.size(), 2u);
  store.Save(ctx);
  EXPECT_EQ(store.Load("demo"), ctx);
}

TEST(SessionStoreTest, UnknownSessionIsAbsent) {
  testing::TempDir dir;
  SessionStore store(dir.path());
  EXPECT_EQ(store.Load("nobody"), std::nullopt);
  EXPECT_FALSE(store.Contains("nobody"));
}

TEST(SessionStoreTest, LatestSaveWins) {
  testing::TempDir dir;
  SessionStore store(dir.path());
  SessionContext ctx = ThreeTurns();
  SessionContext earlier = ctx;
  earlier.history.pop_back();
  store.Save(earlier);
  store.Save(ctx);
  EXPECT_EQ(store.Load("demo"), ctx);
}

TEST(SessionStoreTest, TruncatedSnapshotIsCorrupt) {
  testing::TempDir dir;
  SessionStore store(dir.path());
  store.Save(ThreeTurns());
  auto object = OnlyObject(store);
  std::string bytes = ReadFile(object);
  std::ofstream(object, std::ios::trunc) << bytes.substr(0, bytes.size() / 2);
  EXPECT_EQ(LoadCode(store, "demo"), ErrorCode::kCorruptState);
}

TEST(SessionStoreTest, TamperedContextIsCorrupt) {
  testing::TempDir dir;
  SessionStore store(dir.path());
  store.Save(ThreeTurns());
  auto object = OnlyObject(store);
  Json snapshot = Json::parse(ReadFile(object));
  snapshot["context"]["turn_index"] = 99;
  std::string bytes = snapshot.dump();
  // Rename to the new bytes' hash so only the inner checksum can catch it.
  std::string hash = Sha256Hex(bytes);
  std::filesystem::remove(object);
  std::ofstream(store.dir() / "objects" / (hash + ".json")) << bytes;
  for (const auto& e : std::filesystem::directory_iterator(store.dir() / "heads")) {
    std::ofstream(e.path(), std::ios::trunc) << hash;
  }
  EXPECT_EQ(LoadCode(store, "demo"), ErrorCode::kCorruptState);
}

TEST(SessionStoreTest, DamagedHeadIsCorrupt) {
  testing::TempDir dir;
  SessionStore store(dir.path());
  store.Save(SessionContext{"h"});
  for (const auto& e : std::filesystem::directory_iterator(store.dir() / "heads")) {
    std::ofstream(e.path(), std::ios::trunc) << "abc";
  }
  EXPECT_EQ(LoadCode(store, "h"), ErrorCode::kCorruptState);
}

}  // namespace
}  // namespace taskroute
