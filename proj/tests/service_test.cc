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

#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>

#include "golden_runner.h"
#include "taskroute/error.h"
#include "test_util.h"

namespace taskroute {
namespace {

class CountingExpert : public Expert {
 public:
  ExpertOutput Execute(const ExpertRequest& request) override {
    ++calls;
    return MockExecute(request, MockBackend{});
  }
  std::atomic<int> calls{0};
};

std::string Body(const std::string& text, const std::string& session) {
  return Json{{"text", text}, {"session_id", session}}.dump();
}

TEST(ServiceGoldenTest, Suite) {
  bool fill = std::getenv("TASKROUTE_FILL_GOLDEN") != nullptr;
  auto result = testing::RunGoldenSuite(TASKROUTE_TESTDATA_DIR "/service/golden.json", fill);
  EXPECT_GT(result.cases, 0u);
  for (const auto& f : result.failures) ADD_FAILURE() << f;
}

TEST(ServiceTest, IdempotentExecuteRunsExpertOnce) {
  testing::TempDir dir;
  Config config;
  config.state_dir = dir.path();
  auto counting = std::make_shared<CountingExpert>();
  ExpertRegistry registry;
  registry.Register({"sd", {TaskKind::kImageGen}, MockBackend{}}, counting);
  Service service(config, std::move(registry));

  HttpResponse a = service.HandleExecute(Body("<Gen>a fox</Gen>", "s"), "key");
  HttpResponse b = service.HandleExecute(Body("<Gen>a fox</Gen>", "s"), "key");
  EXPECT_EQ(a.status, 200);
  EXPECT_EQ(a.body.dump(), b.body.dump());
  EXPECT_EQ(counting->calls, 1);
  EXPECT_EQ(service.HandleGetSession("s").body["turn_index"], 1);

  // Without a key each call is a new turn.
  service.HandleExecute(Body("<Gen>a fox</Gen>", "s"), "");
  EXPECT_EQ(counting->calls, 2);
  EXPECT_EQ(service.HandleGetSession("s").body["turn_index"], 2);
}

TEST(ServiceTest, SessionsSurviveRestart) {
  testing::TempDir dir;
  Config config;
  config.state_dir = dir.path();
  Json first;
  {
    Service service(config);
    ASSERT_EQ(service.HandleExecute(Body("<Gen>a fox</Gen>", "s"), "").status, 200);
    first = service.HandleGetSession("s").body;
  }
  Service restarted(config);
  EXPECT_EQ(restarted.HandleGetSession("s").body, first);
  EXPECT_EQ(restarted.HandleExecute(Body("<GlobalEdit>warmer</GlobalEdit>", "s"), "").status, 200);
}

TEST(ServiceTest, RemoteTransportFailureIs502AndNotPersisted) {
  testing::TempDir dir;
  Config config;
  config.state_dir = dir.path();
  RemoteBackend dead;
  dead.endpoint = "http://127.0.0.1:1/v1/run";
  dead.max_retries = 0;
  dead.timeout = std::chrono::milliseconds(200);
  config.experts = {{"sd", {TaskKind::kImageGen}, dead}};
  Service service(config);
  HttpResponse r = service.HandleExecute(Body("<Gen>a fox</Gen>", "s"), "k");
  EXPECT_EQ(r.status, 502);
  EXPECT_EQ(r.body["error"]["code"], "RemoteTimeout");
  EXPECT_EQ(service.HandleGetSession("s").status, 404);
}

TEST(ServiceTest, ConcurrentExecutesSerializePerSession) {
  testing::TempDir dir;
  Config config;
  config.state_dir = dir.path();
  Service service(config);
  constexpr int kSessions = 4, kTurns = 10;
  std::vector<std::thread> threads;
  std::atomic<int> failures{0};
  for (int s = 0; s < kSessions; ++s) {
    for (int t = 0; t < 2; ++t) {
      threads.emplace_back([&, s] {
        for (int i = 0; i < kTurns / 2; ++i) {
          auto r = service.HandleExecute(Body("<Gen>x</Gen>", "s" + std::to_string(s)), "");
          if (r.status != 200) ++failures;
        }
      });
    }
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(failures, 0);
  for (int s = 0; s < kSessions; ++s) {
    Json ctx = service.HandleGetSession("s" + std::to_string(s)).body;
    EXPECT_EQ(ctx["turn_index"], kTurns);
    EXPECT_EQ(ctx["history"].size(), static_cast<std::size_t>(kTurns));
  }
}

}  // namespace
}  // namespace taskroute
