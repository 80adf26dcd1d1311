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

#ifndef TASKROUTE_TOKEN_PROTOCOL_H_
#define TASKROUTE_TOKEN_PROTOCOL_H_

// Grammar of model replies:
//
//   message   := (text | task | grounding)*
//   task      := "<" Tag ">" (text | grounding)* "</" Tag ">"
//   grounding := "<box>" "[" x1 "," y1 "," x2 "," y2 "]" "</box>"
//
// A tag candidate is '<', an optional '/', an ASCII letter, then any run of
// letters, digits or '_', closed by '>'. Every tag candidate must name a
// TaskKind tag or "box"; anything else starting with '<' is plain text.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "taskroute/error.h"
#include "taskroute/region.h"
#include "taskroute/task_kind.h"

namespace taskroute {

// Byte range of the input a segment was parsed from.
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct TextSegment {
  std::string content;

  friend bool operator==(const TextSegment&, const TextSegment&) = default;
};

// `regions` holds the grounding tokens written inside the span, in order.
struct TaskSegment {
  TaskKind kind = TaskKind::kImageGen;
  std::string payload;
  std::vector<Region> regions;

  friend bool operator==(const TaskSegment&, const TaskSegment&) = default;
};

// A grounding token outside any task span.
struct GroundingSegment {
  Region region;

  friend bool operator==(const GroundingSegment&,
                         const GroundingSegment&) = default;
};

struct Segment {
  std::variant<TextSegment, TaskSegment, GroundingSegment> value;
  SourceSpan span;

  Segment() = default;
  Segment(TextSegment v, SourceSpan s = {}) : value(std::move(v)), span(s) {}
  Segment(TaskSegment v, SourceSpan s = {}) : value(std::move(v)), span(s) {}
  Segment(GroundingSegment v, SourceSpan s = {})
      : value(std::move(v)), span(s) {}

  const TextSegment* text() const { return std::get_if<TextSegment>(&value); }
  const TaskSegment* task() const { return std::get_if<TaskSegment>(&value); }
  const GroundingSegment* grounding() const {
    return std::get_if<GroundingSegment>(&value);
  }

  // Segment equality is structural; source spans are not compared.
  friend bool operator==(const Segment& a, const Segment& b) {
    return a.value == b.value;
  }
};

struct ParsedMessage {
  std::vector<Segment> segments;
  std::string raw;
};

enum class MalformedReason {
  kUnknownTag,
  kUnmatchedClose,
  kMismatchedClose,
  kNestedTask,
  kTagInGrounding,
  kUnclosedSpan,
  kInvalidRegion,
};

std::string_view MalformedReasonName(MalformedReason reason);

// Thrown by Parse and ParseStream. code() is always kMalformedToken.
class ParseError : public Error {
 public:
  ParseError(MalformedReason reason, std::size_t offset, std::string detail);

  MalformedReason reason() const { return reason_; }

  friend bool operator==(const ParseError& a, const ParseError& b) {
    return a.reason_ == b.reason_ && a.offset() == b.offset() &&
           a.detail() == b.detail();
  }

 private:
  MalformedReason reason_;
};

ParsedMessage Parse(std::string_view text);

// Incremental parser state. A value type: copy it to fork a stream.
struct StreamState {
  enum class Mode { kText, kTask, kGrounding };

  Mode mode = Mode::kText;
  std::size_t consumed = 0;  // absolute offset of the next input byte

  // Possible tag candidate being accumulated, starting with '<'.
  std::string tag_buffer;
  std::size_t tag_start = 0;

  std::string text;  // pending text, or pending payload in kTask
  std::size_t text_start = 0;

  TaskSegment task;
  std::size_t task_start = 0;

  bool grounding_in_task = false;
  std::string grounding_interior;
  std::size_t grounding_start = 0;
  std::size_t interior_start = 0;

  std::optional<ParseError> failure;
  bool finished = false;
};

// Consumes `chunk` and returns every segment whose end is now known. With
// `end_of_input` the remaining text is flushed and dangling spans raise
// ParseError. After a ParseError the state is poisoned and rethrows.
std::vector<Segment> ParseStream(std::string_view chunk, StreamState& state,
                                 bool end_of_input = false);

// Canonical text. Throws Error(kInvalidSegment) for segments that cannot
// round-trip: out-of-bounds regions, empty or adjacent text segments, or
// content containing a tag candidate.
std::string Serialize(const ParsedMessage& msg);
std::string Serialize(const std::vector<Segment>& segments);

// First tag candidate at or after `from`, as (offset, length).
std::optional<std::pair<std::size_t, std::size_t>> FindTagCandidate(
    std::string_view text, std::size_t from = 0);

enum class ViolationCode {
  kMalformedToken,
  kInvalidRegion,
  kMissingRegion,
  kRoleOrder,
};

std::string_view ViolationCodeName(ViolationCode code);
std::optional<ViolationCode> ViolationCodeFromName(std::string_view name);

struct Violation {
  ViolationCode code = ViolationCode::kMalformedToken;
  std::size_t offset = 0;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> Validate(const ParsedMessage& msg);

// Parses then validates; a parse failure becomes a single violation.
std::vector<Violation> ValidateText(std::string_view text);

Violation ViolationFromParseError(const ParseError& e);

// Regions bound to each task segment and the grounding tokens bound to none.
// A task owns the regions inside its span plus every grounding segment that
// follows it with only whitespace text in between.
struct RegionBinding {
  std::vector<std::vector<Region>> task_regions;  // one entry per task segment
  std::vector<Region> standalone;
};

RegionBinding BindRegions(const std::vector<Segment>& segments);

}  // namespace taskroute

#endif  // TASKROUTE_TOKEN_PROTOCOL_H_
