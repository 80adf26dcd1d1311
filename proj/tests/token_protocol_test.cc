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

#include "taskroute/token_protocol.h"

#include <gtest/gtest.h>

#include "taskroute/json_io.h"
#include "test_util.h"

namespace taskroute {
namespace {

using testing::Rng;

std::vector<Segment> StreamAll(const std::vector<std::string>& chunks) {
  StreamState state;
  std::vector<Segment> out;
  for (const auto& c : chunks) {
    auto segs = ParseStream(c, state);
    out.insert(out.end(), segs.begin(), segs.end());
  }
  auto tail = ParseStream("", state, true);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

ParseError ParseFailure(std::string_view text) {
  try {
    Parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error for: " << text;
  return ParseError(MalformedReason::kUnknownTag, 0, "");
}

TEST(TaskTagTest, TagTableIsBijective) {
  std::set<std::string_view> tags;
  for (TaskKind kind : kAllTaskKinds) {
    auto tag = TaskKindTag(kind);
    EXPECT_TRUE(tags.insert(tag).second) << tag;
    EXPECT_EQ(TaskKindFromTag(tag), kind);
    EXPECT_NE(tag, kGroundingTag);
  }
  EXPECT_EQ(TaskKindTag(TaskKind::kImageEditRegion), "Edit");
  EXPECT_EQ(TaskKindTag(TaskKind::kImageSeg), "Seg");
  EXPECT_EQ(TaskKindTag(TaskKind::kImageGen), "Gen");
  EXPECT_FALSE(TaskKindFromTag("edit"));
}

TEST(ParseTest, EditExample) {
  ParsedMessage m = Parse("Sure. <Edit>remove the dog</Edit><box>[0.320,0.410,0.780,0.950]</box>");
  ASSERT_EQ(m.segments.size(), 3u);
  EXPECT_EQ(m.segments[0], Segment(TextSegment{"Sure. "}));
  EXPECT_EQ(m.segments[1],
            Segment(TaskSegment{TaskKind::kImageEditRegion, "remove the dog", {}}));
  EXPECT_EQ(m.segments[2], Segment(GroundingSegment{{0.32, 0.41, 0.78, 0.95}}));
  EXPECT_EQ(m.segments[0].span, (SourceSpan{0, 6}));
  EXPECT_EQ(m.segments[1].span, (SourceSpan{6, 27}));
  EXPECT_EQ(m.segments[2].span, (SourceSpan{33, 36}));
}

TEST(ParseTest, EmptyInputHasNoSegments) { EXPECT_TRUE(Parse("").segments.empty()); }

TEST(ParseTest, MismatchedCloseReportsItsOffset) {
  ParseError e = ParseFailure("<Edit>a</Seg>");
  EXPECT_EQ(e.code(), ErrorCode::kMalformedToken);
  EXPECT_EQ(e.reason(), MalformedReason::kMismatchedClose);
  EXPECT_EQ(e.offset(), 7u);
}

TEST(ParseTest, MalformedReasons) {
  EXPECT_EQ(ParseFailure("hi <Foo>").reason(), MalformedReason::kUnknownTag);
  EXPECT_EQ(ParseFailure("hi <Foo>").offset(), 3u);
  EXPECT_EQ(ParseFailure("</Gen>").reason(), MalformedReason::kUnmatchedClose);
  EXPECT_EQ(ParseFailure("<Gen><Seg>x</Seg></Gen>").reason(), MalformedReason::kNestedTask);
  EXPECT_EQ(ParseFailure("<box>[0,0,<Gen>]</box>").reason(), MalformedReason::kTagInGrounding);
  EXPECT_EQ(ParseFailure("<Gen>x").reason(), MalformedReason::kUnclosedSpan);
  EXPECT_EQ(ParseFailure("<box>[0,0,1,1]").reason(), MalformedReason::kUnclosedSpan);
  EXPECT_EQ(ParseFailure("<box>[0.5,0.5,0.2,0.9]</box>").reason(),
            MalformedReason::kInvalidRegion);
  EXPECT_EQ(ParseFailure("</box>").reason(), MalformedReason::kUnmatchedClose);
}

TEST(ParseTest, NonCandidateAnglesArePlainText) {
  ParsedMessage m = Parse("a < b and 3<4, <3 <_x> <>");
  ASSERT_EQ(m.segments.size(), 1u);
  EXPECT_EQ(m.segments[0].text()->content, "a < b and 3<4, <3 <_x> <>");
}

TEST(ParseTest, BoxesInsideSpanBelongToTask) {
  ParsedMessage m = Parse("<Seg>cat<box>[0,0,0.5,0.5]</box> and dog<box>[0.5,0.5,1,1]</box></Seg>");
  ASSERT_EQ(m.segments.size(), 1u);
  const TaskSegment* t = m.segments[0].task();
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->payload, "cat and dog");
  ASSERT_EQ(t->regions.size(), 2u);
  EXPECT_EQ(t->regions[1], (Region{0.5, 0.5, 1, 1}));
}

TEST(ParseTest, AnyDecimalPrecisionIsAccepted) {
  ParsedMessage m = Parse("<box>[0.1234567,0, 1 ,1.0]</box>");
  EXPECT_DOUBLE_EQ(m.segments[0].grounding()->region.x1, 0.1234567);
}

TEST(StreamTest, SplitOpeningTag) {
  StreamState s;
  EXPECT_TRUE(ParseStream("<Ed", s).empty());
  auto segs = ParseStream("it>x</Edit>", s);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], Segment(TaskSegment{TaskKind::kImageEditRegion, "x", {}}));
}

TEST(StreamTest, FlushEmitsPendingText) {
  StreamState s;
  EXPECT_TRUE(ParseStream("hello", s).empty());
  auto segs = ParseStream("", s, true);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], Segment(TextSegment{"hello"}));
}

TEST(StreamTest, UnclosedSpanFailsAtFlushAndPoisonsState) {
  StreamState s;
  ParseStream("<Edit>x", s);
  EXPECT_THROW(ParseStream("", s, true), ParseError);
  EXPECT_THROW(ParseStream("more", s), ParseError);
}

TEST(StreamTest, SameErrorAsBatch) {
  const std::string text = "ok <Gen>a</Gen> <Edit>b</Seg>";
  ParseError batch = ParseFailure(text);
  StreamState s;
  try {
    for (char c : text) ParseStream(std::string_view(&c, 1), s);
    ParseStream("", s, true);
    FAIL() << "stream accepted malformed input";
  } catch (const ParseError& e) {
    EXPECT_EQ(e, batch);
  }
}

TEST(StreamTest, RandomChunkingsMatchBatch) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    std::string text = Serialize(testing::RandomSegments(rng));
    ParsedMessage batch = Parse(text);
    for (int k = 0; k < 5; ++k) {
      auto chunks = testing::RandomChunks(rng, text, testing::Uniform(rng, 0, 8));
      auto streamed = StreamAll(chunks);
      ASSERT_EQ(streamed, batch.segments) << text;
      for (std::size_t j = 0; j < streamed.size(); ++j) {
        EXPECT_EQ(streamed[j].span, batch.segments[j].span);
      }
    }
  }
}

TEST(SerializeTest, Examples) {
  EXPECT_EQ(Serialize(std::vector<Segment>{GroundingSegment{{0, 0, 1, 1}}}),
            "<box>[0.000,0.000,1.000,1.000]</box>");
  EXPECT_EQ(Serialize(std::vector<Segment>{TextSegment{"hi"}}), "hi");
  const std::string example =
      "Sure. <Edit>remove the dog</Edit><box>[0.320,0.410,0.780,0.950]</box>";
  EXPECT_EQ(Serialize(Parse(example)), example);
  EXPECT_EQ(Parse(Serialize(Parse(example))).segments, Parse(example).segments);
}

TEST(SerializeTest, RejectsSegmentsThatCannotRoundTrip) {
  using V = std::vector<Segment>;
  EXPECT_THROW(Serialize(V{TextSegment{""}}), Error);
  EXPECT_THROW(Serialize(V{TextSegment{"a"}, TextSegment{"b"}}), Error);
  EXPECT_THROW(Serialize(V{TextSegment{"<Gen>"}}), Error);
  EXPECT_THROW(Serialize(V{TaskSegment{TaskKind::kImageGen, "</Gen>", {}}}), Error);
  EXPECT_THROW(Serialize(V{GroundingSegment{{0.5, 0, 0.2, 1}}}), Error);
}

TEST(SerializeTest, RoundTripProperty) {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    auto segs = testing::RandomSegments(rng);
    EXPECT_EQ(Parse(Serialize(segs)).segments, segs);
  }
}

TEST(ValidateTest, Examples) {
  EXPECT_TRUE(ValidateText("Sure. <Edit>remove the dog</Edit><box>[0.320,0.410,0.780,0.950]</box>")
                  .empty());
  auto v = Validate(ParsedMessage{{TaskSegment{TaskKind::kImageSeg, "the cat", {}}}, ""});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::kMissingRegion);
  EXPECT_TRUE(Validate(ParsedMessage{{TaskSegment{TaskKind::kImageGen, "a sunset", {}}}, ""})
                  .empty());
}

TEST(ValidateTest, ParseFailuresBecomeViolations) {
  auto v = ValidateText("<Edit>x");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::kMalformedToken);
  auto r = ValidateText("<Gen>x</Gen><box>[1.2,0,0,0]</box>");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].code, ViolationCode::kInvalidRegion);
}

TEST(ValidateTest, AdjacentGroundingSatisfiesRegion) {
  EXPECT_TRUE(ValidateText("<Seg>cat</Seg> \n<box>[0,0,1,1]</box>").empty());
  auto v = ValidateText("<Seg>cat</Seg> see <box>[0,0,1,1]</box>");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::kMissingRegion);
}

TEST(ValidateTest, ViolationJsonShape) {
  Json j = Violation{ViolationCode::kMissingRegion, 4, "x"};
  EXPECT_EQ(j, Json::parse(R"({"code":"MissingRegion","offset":4,"detail":"x"})"));
}

TEST(BindRegionsTest, AdjacencyRuns) {
  auto segs = Parse("<Edit>a</Edit><box>[0,0,1,1]</box> <box>[0,0,0.5,0.5]</box>x"
                    "<box>[0.1,0.1,0.2,0.2]</box>")
                  .segments;
  RegionBinding b = BindRegions(segs);
  ASSERT_EQ(b.task_regions.size(), 1u);
  EXPECT_EQ(b.task_regions[0].size(), 2u);
  ASSERT_EQ(b.standalone.size(), 1u);
  EXPECT_EQ(b.standalone[0], (Region{0.1, 0.1, 0.2, 0.2}));
}

TEST(FindTagCandidateTest, Basics) {
  EXPECT_EQ(FindTagCandidate("ab <Gen> c"), std::make_pair(std::size_t{3}, std::size_t{5}));
  EXPECT_EQ(FindTagCandidate("</x_1>"), std::make_pair(std::size_t{0}, std::size_t{6}));
  EXPECT_FALSE(FindTagCandidate("a < b <1> <>"));
}

}  // namespace
}  // namespace taskroute
