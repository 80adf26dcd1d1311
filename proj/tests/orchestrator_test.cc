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

#include "taskroute/orchestrator.h"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "taskroute/config.h"
#include "taskroute/error.h"
#include "test_util.h"

#ifndef TASKROUTE_TESTDATA_DIR
#error "TASKROUTE_TESTDATA_DIR must be defined"
#endif

namespace taskroute {
namespace {

const std::filesystem::path kTestdata = TASKROUTE_TESTDATA_DIR;

Config TestConfig(const testing::TempDir& dir) {
  Config c;
  c.state_dir = dir.path();
  return c;
}

TEST(TranscriptTest, ReadsJsonl) {
  std::ifstream in(kTestdata / "six_turn_transcript.jsonl");
  Transcript t = ReadTranscriptJsonl(in);
  EXPECT_EQ(t.session_id, "demo-6");
  EXPECT_EQ(t.turns.size(), 6u);
}

TEST(TranscriptTest, RejectsMixedSessionsAndEmptyInput) {
  std::stringstream mixed(R"({"session_id":"a","turn_text":"x"})"
                          "\n"
                          R"({"session_id":"b","turn_text":"y"})");
  EXPECT_THROW(ReadTranscriptJsonl(mixed), Error);
  std::stringstream empty("\n");
  EXPECT_THROW(ReadTranscriptJsonl(empty), Error);
}

TEST(RunTranscriptTest, EditConsumesPreviousGeneration) {
  testing::TempDir dir;
  Transcript t{"s", {"<Gen>a cat</Gen>", "<Edit>add a hat</Edit><box>[0.2,0.1,0.6,0.4]</box>"}};
  RunReport r = RunTranscript(t, TestConfig(dir));
  ASSERT_EQ(r.turns.size(), 2u);
  const auto& gen = r.turns[0].outcome.result->outcomes[0].output()->artifact()->hash;
  const auto& edit_plan = *r.turns[1].outcome.plan;
  EXPECT_EQ(edit_plan.invocations[0].inputs[0].hash, gen);
  EXPECT_TRUE(r.turns[1].outcome.result->outcomes[0].ok());
}

TEST(RunTranscriptTest, TextOnlyTurnsHaveNoInvocations) {
  testing::TempDir dir;
  RunReport r = RunTranscript(Transcript{"s", {"hello", "how are you?"}}, TestConfig(dir));
  for (const auto& turn : r.turns) {
    EXPECT_FALSE(turn.outcome.error);
    EXPECT_TRUE(turn.outcome.plan->invocations.empty());
  }
  EXPECT_EQ(r.final_context.turn_index, 2u);
}

TEST(RunTranscriptTest, ErrorsAreIsolatedPerTurn) {
  testing::TempDir dir;
  Transcript t{"s", {"<Gen>a", "<GlobalEdit>warmer</GlobalEdit>", "<Seg>cat</Seg>",
                     "<Gen>ok</Gen>", "<GlobalEdit>warmer</GlobalEdit>"}};
  RunReport r = RunTranscript(t, TestConfig(dir));
  ASSERT_EQ(r.turns.size(), 5u);
  EXPECT_EQ(r.turns[0].outcome.error->stage, "parse");
  EXPECT_EQ(r.turns[0].outcome.error->code, "MalformedToken");
  EXPECT_EQ(r.turns[1].outcome.error->code, "MissingArtifact");
  EXPECT_EQ(r.turns[2].outcome.error->code, "MissingRegion");
  EXPECT_FALSE(r.turns[3].outcome.error);
  EXPECT_FALSE(r.turns[4].outcome.error);
  // Failed turns leave the session untouched.
  EXPECT_EQ(r.final_context.turn_index, 2u);
}

TEST(RunTranscriptTest, ReportIsByteIdenticalAcrossRuns) {
  testing::TempDir a, b;
  std::ifstream in(kTestdata / "six_turn_transcript.jsonl");
  Transcript t = ReadTranscriptJsonl(in);
  Config ca = TestConfig(a), cb = TestConfig(a);
  EXPECT_EQ(Json(RunTranscript(t, ca)).dump(), Json(RunTranscript(t, cb)).dump());
  // Artifact bytes land in the state directory.
  Config cc = TestConfig(b);
  RunReport r = RunTranscript(t, cc);
  ArtifactStore store(b.path() / "artifacts");
  EXPECT_TRUE(store.Contains(r.turns[0].outcome.result->outcomes[0].output()->hash()));
}

TEST(RunTranscriptTest, ReportEchoesConfig) {
  testing::TempDir dir;
  Config c = TestConfig(dir);
  c.log_level = "debug";
  Json j = RunTranscript(Transcript{"s", {"hi"}}, c);
  EXPECT_EQ(j["config"]["log_level"], "debug");
  EXPECT_EQ(j["summary"]["turns"], 1);
}

TEST(ConfigTest, PrecedenceFlagsOverEnvOverFile) {
  testing::TempDir dir;
  auto file = dir.path() / "c.json";
  std::ofstream(file) << R"({"listen":"0.0.0.0:1","log_level":"warn","state_dir":"file-dir"})";
  std::map<std::string, std::string> env{{"TASKROUTE_LISTEN", "0.0.0.0:2"},
                                         {"TASKROUTE_STATE_DIR", "env-dir"}};
  EnvLookup lookup = [&](const char* name) -> std::optional<std::string> {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  ConfigOverrides flags;
  flags.listen = "0.0.0.0:3";
  Config c = LoadConfig(file, flags, lookup);
  EXPECT_EQ(c.listen, "0.0.0.0:3");
  EXPECT_EQ(c.state_dir, "env-dir");
  EXPECT_EQ(c.log_level, "warn");
  EXPECT_EQ(c.experts, DefaultExpertLineup());
}

TEST(ConfigTest, RejectsBadConfigs) {
  auto code = [](const char* text) {
    try {
      ConfigFromJson(Json::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(R"({"listn":"x"})"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code(R"({"listen":"nohost"})"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code(R"({"log_level":"loud"})"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code(R"({"experts":[{"name":"a","kinds":["ImageGen"],"backend":"mock"},
                                {"name":"b","kinds":["ImageGen"],"backend":"mock"}]})"),
            ErrorCode::kDuplicateKind);
  EXPECT_EQ(code(R"({"experts":[{"name":"a","kinds":["ImageGen"],"backend":"remote",
                                 "endpoint":"https://x"}]})"),
            ErrorCode::kInvalidConfig);
}

TEST(ConfigTest, CheckedInConfigsLoad) {
  Config c = LoadConfig(kTestdata / ".." / "configs" / "mock_registry.json", {},
                        [](const char*) { return std::nullopt; });
  EXPECT_EQ(c.experts.size(), 9u);
  EXPECT_NO_THROW(LoadConfig(kTestdata / ".." / "configs" / "remote_example.json", {},
                             [](const char*) { return std::nullopt; }));
  EXPECT_EQ(ConfigFromJson(ConfigToJson(c)), c);
}

TEST(ConfigTest, ParseListen) {
  EXPECT_EQ(ParseListen("127.0.0.1:8080").port, 8080);
  EXPECT_EQ(ParseListen("127.0.0.1:8080").host, "127.0.0.1");
  EXPECT_THROW(ParseListen("127.0.0.1:99999"), Error);
  EXPECT_THROW(ParseListen(":80"), Error);
}

}  // namespace
}  // namespace taskroute
