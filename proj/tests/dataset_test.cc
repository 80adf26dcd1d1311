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

#include "taskroute/dataset.h"

#include <sstream>

#include <gtest/gtest.h>

#include "taskroute/error.h"
#include "test_util.h"

#ifndef TASKROUTE_TEMPLATES_DIR
#error "TASKROUTE_TEMPLATES_DIR must be defined"
#endif

namespace taskroute {
namespace {

TemplateSet Fixtures() { return TemplateSet::LoadDirectory(TASKROUTE_TEMPLATES_DIR); }

AnnotatedSample SegSample() {
  return AnnotatedSample{"img.jpg", {{"the red car", Region{0.1, 0.2, 0.5, 0.6}}},
                         TaskKind::kImageSeg, "refcoco"};
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

TEST(TemplateSetTest, FixturesCoverEveryKind) {
  TemplateSet set = Fixtures();
  std::set<TaskKind> kinds;
  for (const auto& t : set.templates()) kinds.insert(t.task);
  for (TaskKind k : kAllTaskKinds) EXPECT_TRUE(kinds.count(k)) << TaskKindName(k);
}

TEST(TemplateSetTest, RejectsBrokenTemplates) {
  TemplateSet set;
  EXPECT_EQ(CodeOf([&] { set.Add({"a", TaskKind::kImageSeg, "u", "<Seg>{caption}</Seg>"}); }),
            ErrorCode::kInvalidConfig);  // no region
  EXPECT_EQ(CodeOf([&] { set.Add({"b", TaskKind::kImageGen, "u", "<Gen>{caption}"}); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { set.Add({"c", TaskKind::kImageGen, "u", "<AudioGen>x</AudioGen>"}); }),
            ErrorCode::kInvalidConfig);
  set.Add({"d", TaskKind::kImageGen, "u", "<Gen>{caption}</Gen>"});
  EXPECT_EQ(CodeOf([&] { set.Add({"d", TaskKind::kImageGen, "u", "<Gen>x</Gen>"}); }),
            ErrorCode::kInvalidConfig);
}

TEST(ConvertSampleTest, SegmentationSample) {
  ConversationRecord r = ConvertSample(SegSample(), Fixtures(), "seg-refer");
  ASSERT_EQ(r.turns.size(), 2u);
  EXPECT_EQ(r.turns[0].role, Role::kUser);
  EXPECT_EQ(r.turns[1].role, Role::kAssistant);
  EXPECT_NE(r.turns[1].content.find("<Seg>the red car</Seg><box>[0.100,0.200,0.500,0.600]</box>"),
            std::string::npos);
  EXPECT_EQ(r.task_kinds, std::set<TaskKind>{TaskKind::kImageSeg});
  EXPECT_FALSE(CheckRecord(r));
}

TEST(ConvertSampleTest, GenerationHasNoBox) {
  AnnotatedSample s{"x", {{"a brown bear", std::nullopt}}, TaskKind::kImageGen, "cc"};
  ConversationRecord r = ConvertSample(s, Fixtures(), "gen-plain");
  EXPECT_NE(r.turns[1].content.find("<Gen>a brown bear</Gen>"), std::string::npos);
  EXPECT_EQ(r.turns[1].content.find("<box>"), std::string::npos);
}

TEST(ConvertSampleTest, Errors) {
  AnnotatedSample no_box{"x", {{"the cat", std::nullopt}}, TaskKind::kImageSeg, ""};
  EXPECT_EQ(CodeOf([&] { ConvertSample(no_box, Fixtures(), "seg-refer"); }),
            ErrorCode::kRegionRequired);
  EXPECT_EQ(CodeOf([&] { ConvertSample(SegSample(), Fixtures(), "nope"); }),
            ErrorCode::kTemplateMissing);
  EXPECT_EQ(CodeOf([&] { ConvertSample(SegSample(), Fixtures(), "gen-plain"); }),
            ErrorCode::kTemplateMissing);
  AnnotatedSample empty{"x", {}, TaskKind::kImageSeg, ""};
  EXPECT_EQ(CodeOf([&] { ConvertSample(empty, Fixtures(), "seg-refer"); }),
            ErrorCode::kInsufficientCaptions);
  AnnotatedSample tagged{"x", {{"a <Gen> cat", Region{0, 0, 1, 1}}}, TaskKind::kImageSeg, ""};
  EXPECT_EQ(CodeOf([&] { ConvertSample(tagged, Fixtures(), "seg-refer"); }),
            ErrorCode::kInvalidInput);
}

TEST(ConvertSampleTest, PlaceholdersInCaptionsAreNotExpanded) {
  AnnotatedSample s{"x", {{"{box} and {caption}", Region{0, 0, 1, 1}}}, TaskKind::kImageSeg, ""};
  ConversationRecord r = ConvertSample(s, Fixtures(), "seg-refer");
  EXPECT_NE(r.turns[1].content.find("<Seg>{box} and {caption}</Seg>"), std::string::npos);
  EXPECT_FALSE(CheckRecord(r));
}

TEST(BuildMultiturnTest, OneTurnEqualsConvertSample) {
  TemplateSet set = Fixtures();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ConversationRecord r = BuildMultiturn(SegSample(), 1, seed, set);
    ASSERT_EQ(r.template_ids.size(), 1u);
    ConversationRecord c = ConvertSample(SegSample(), set, r.template_ids[0]);
    EXPECT_EQ(r.turns, c.turns);
    EXPECT_EQ(r.task_kinds, c.task_kinds);
  }
}

TEST(BuildMultiturnTest, DeterministicValidAndVaried) {
  TemplateSet set = Fixtures();
  ConversationRecord a = BuildMultiturn(SegSample(), 3, 42, set);
  EXPECT_EQ(a, BuildMultiturn(SegSample(), 3, 42, set));
  ASSERT_EQ(a.turns.size(), 6u);
  for (std::size_t i = 1; i < a.turns.size(); i += 2) {
    EXPECT_TRUE(ValidateText(a.turns[i].content).empty()) << a.turns[i].content;
  }
  for (std::size_t i = 1; i < a.template_ids.size(); ++i) {
    EXPECT_NE(set.Find(a.template_ids[i])->task, set.Find(a.template_ids[i - 1])->task);
  }
  EXPECT_EQ(CodeOf([&] { BuildMultiturn(SegSample(), 0, 1, set); }), ErrorCode::kInvalidInput);
}

TEST(BuildMultiturnTest, VideoInputsOnlyAfterAVideo) {
  TemplateSet set = Fixtures();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ConversationRecord r = BuildMultiturn(SegSample(), 6, seed, set);
    bool have_video = false;
    for (const auto& id : r.template_ids) {
      TaskKind k = set.Find(id)->task;
      if (InputSlot(k) == ArtifactSlot::kCurrentVideo) {
        EXPECT_TRUE(have_video) << id;
      }
      if (OutputMedia(k) == MediaKind::kVideo) have_video = true;
    }
  }
}

TEST(FilterTest, KeepsGoodRejectsBad) {
  ConversationRecord good = ConvertSample(SegSample(), Fixtures(), "seg-refer");
  ConversationRecord bad = good;
  bad.id = "bad";
  bad.turns[1].content = "Sure. <Edit>remove it";
  FilterReport rep = FilterRecords({good, bad});
  EXPECT_EQ(rep.input, 2u);
  EXPECT_EQ(rep.kept, 1u);
  ASSERT_EQ(rep.rejected.size(), 1u);
  EXPECT_EQ(rep.rejected[0].record_id, "bad");
  EXPECT_EQ(rep.rejected[0].violation.code, ViolationCode::kMalformedToken);
}

TEST(FilterTest, SeventeenOfHundred) {
  TemplateSet set = Fixtures();
  testing::Rng rng(17);
  std::vector<ConversationRecord> records;
  std::set<std::string> corrupted;
  for (int i = 0; i < 100; ++i) {
    AnnotatedSample s = SegSample();
    s.image_ref = "img-" + std::to_string(i);
    ConversationRecord r = BuildMultiturn(s, 1 + i % 4, i, set);
    if (i % 6 == 0 && corrupted.size() < 17) {
      auto kind = static_cast<FaultKind>((i / 6) % 3);
      r = InjectFault(r, kind, i).record;
      corrupted.insert(r.id);
    }
    records.push_back(r);
  }
  ASSERT_EQ(corrupted.size(), 17u);
  std::vector<ConversationRecord> kept;
  FilterReport rep = FilterRecords(records, &kept);
  EXPECT_EQ(rep.kept, 83u);
  EXPECT_EQ(kept.size(), 83u);
  std::set<std::string> rejected;
  for (const auto& r : rep.rejected) rejected.insert(r.record_id);
  EXPECT_EQ(rejected, corrupted);
}

TEST(FaultTest, EachKindProducesItsViolation) {
  TemplateSet set = Fixtures();
  ConversationRecord r = BuildMultiturn(SegSample(), 3, 1, set);
  for (FaultKind kind : {FaultKind::kTagDrop, FaultKind::kBoundBreak, FaultKind::kRoleSwap}) {
    InjectedFault f = InjectFault(r, kind, 9);
    auto rej = CheckRecord(f.record);
    ASSERT_TRUE(rej);
    EXPECT_EQ(rej->violation.code, f.expected);
    EXPECT_EQ(rej->turn, f.turn);
  }
}

TEST(StatsTest, Examples) {
  DatasetStats empty = ComputeStats({});
  EXPECT_EQ(empty.records, 0u);
  for (const auto& [k, v] : empty.kind_counts) EXPECT_EQ(v, 0u);

  std::vector<ConversationRecord> segs(10, ConvertSample(SegSample(), Fixtures(), "seg-refer"));
  DatasetStats s = ComputeStats(segs);
  EXPECT_EQ(s.kind_counts.at(TaskKind::kImageSeg), 10u);
  for (const auto& [k, v] : s.kind_counts) {
    if (k != TaskKind::kImageSeg) {
      EXPECT_EQ(v, 0u);
    }
  }
  EXPECT_EQ(s.turn_histogram.at(2), 10u);
  EXPECT_EQ(s.region_histogram.at(1), 10u);
}

TEST(StatsTest, HistogramsPartitionAndMergeIsAdditive) {
  TemplateSet set = Fixtures();
  std::vector<ConversationRecord> a, b;
  for (int i = 0; i < 40; ++i) (i % 2 ? a : b).push_back(BuildMultiturn(SegSample(), 1 + i % 5, i, set));
  DatasetStats sa = ComputeStats(a), sb = ComputeStats(b);
  std::vector<ConversationRecord> all = a;
  all.insert(all.end(), b.begin(), b.end());
  DatasetStats merged = sa;
  merged.Merge(sb);
  DatasetStats direct = ComputeStats(all);
  EXPECT_EQ(Json(merged), Json(direct));
  std::size_t turns = 0, regions = 0;
  for (const auto& [k, v] : direct.turn_histogram) turns += v;
  for (const auto& [k, v] : direct.region_histogram) regions += v;
  EXPECT_EQ(turns, 40u);
  EXPECT_EQ(regions, 40u);
}

TEST(JsonlTest, RecordsRoundTripWithHeader) {
  TemplateSet set = Fixtures();
  std::vector<ConversationRecord> records;
  for (int i = 0; i < 5; ++i) records.push_back(BuildMultiturn(SegSample(), 2, i, set));
  std::stringstream io;
  WriteRecordsJsonl(io, records);
  std::string first;
  std::getline(io, first);
  EXPECT_EQ(Json::parse(first), Json::parse(R"({"schema":"taskroute.conversation","version":1})"));
  io.seekg(0);
  EXPECT_EQ(ReadRecordsJsonl(io), records);
  std::stringstream bad(R"({"schema":"taskroute.conversation","version":9})");
  EXPECT_THROW(ReadRecordsJsonl(bad), Error);
}

TEST(JsonlTest, SamplesParse) {
  std::stringstream in(
      R"({"image_ref":"a","captions":[{"text":"t","box":[0,0,1,1]}],"source_task":"ImageSeg","source_dataset":"d"})"
      "\n\n"
      R"({"image_ref":"b","captions":[{"text":"u"}],"source_task":"ImageGen"})");
  auto samples = ReadSamplesJsonl(in);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].captions[0].box, (Region{0, 0, 1, 1}));
  EXPECT_FALSE(samples[1].captions[0].box);
  std::stringstream broken("{not json");
  EXPECT_THROW(ReadSamplesJsonl(broken), Error);
}

}  // namespace
}  // namespace taskroute
