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

#include <utility>

namespace taskroute {
namespace {

bool IsAsciiLetter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool IsNameChar(char c) {
  return IsAsciiLetter(c) || (c >= '0' && c <= '9') || c == '_';
}

bool IsBlank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

struct Tag {
  bool closing = false;
  std::string_view name;
  std::size_t offset = 0;
  std::size_t length = 0;

  std::size_t end() const { return offset + length; }
};

// Lexes a complete tag candidate starting at `pos`, which must hold '<'.
std::optional<Tag> LexTag(std::string_view text, std::size_t pos) {
  std::size_t i = pos + 1;
  Tag tag;
  tag.offset = pos;
  if (i < text.size() && text[i] == '/') {
    tag.closing = true;
    ++i;
  }
  if (i >= text.size() || !IsAsciiLetter(text[i])) return std::nullopt;
  std::size_t name_start = i;
  while (i < text.size() && IsNameChar(text[i])) ++i;
  if (i >= text.size() || text[i] != '>') return std::nullopt;
  tag.name = text.substr(name_start, i - name_start);
  tag.length = i + 1 - pos;
  return tag;
}

std::optional<Tag> NextTag(std::string_view text, std::size_t from) {
  for (std::size_t p = text.find('<', from); p != std::string_view::npos;
       p = text.find('<', p + 1)) {
    if (auto tag = LexTag(text, p)) return tag;
  }
  return std::nullopt;
}

std::string Describe(const Tag& tag) {
  return std::string(tag.closing ? "</" : "<") + std::string(tag.name) + ">";
}

// Classification shared by the batch and streaming parsers so both report
// identical reasons for identical inputs.
enum class TagRole { kUnknown, kBox, kTask };

TagRole Classify(std::string_view name, std::optional<TaskKind>& kind) {
  if (name == kGroundingTag) return TagRole::kBox;
  kind = TaskKindFromTag(name);
  return kind ? TagRole::kTask : TagRole::kUnknown;
}

[[noreturn]] void ThrowUnknown(const Tag& tag) {
  throw ParseError(MalformedReason::kUnknownTag, tag.offset,
                   "unknown tag " + Describe(tag));
}

Region ParseInterior(std::string_view interior, std::size_t offset) {
  try {
    return ParseRegion(interior);
  } catch (const Error& e) {
    throw ParseError(MalformedReason::kInvalidRegion, offset, e.detail());
  }
}

// Batch parser over the whole input.
class BatchParser {
 public:
  explicit BatchParser(std::string_view text) : text_(text) {}

  std::vector<Segment> Run() {
    std::size_t text_start = 0;
    std::size_t pos = 0;
    while (auto tag = NextTag(text_, pos)) {
      std::optional<TaskKind> kind;
      TagRole role = Classify(tag->name, kind);
      if (role == TagRole::kUnknown) ThrowUnknown(*tag);
      if (tag->closing) {
        throw ParseError(MalformedReason::kUnmatchedClose, tag->offset,
                         "closing tag " + Describe(*tag) + " without opener");
      }
      EmitText(text_start, tag->offset);
      std::size_t end = 0;
      if (role == TagRole::kBox) {
        auto [region, box_end] = ReadGrounding(*tag);
        out_.emplace_back(GroundingSegment{region},
                          SourceSpan{tag->offset, box_end - tag->offset});
        end = box_end;
      } else {
        end = ReadTask(*tag, *kind);
      }
      pos = text_start = end;
    }
    EmitText(text_start, text_.size());
    return std::move(out_);
  }

 private:
  void EmitText(std::size_t begin, std::size_t end) {
    if (end > begin) {
      out_.emplace_back(TextSegment{std::string(text_.substr(begin, end - begin))},
                        SourceSpan{begin, end - begin});
    }
  }

  // Returns the region and the offset just past </box>.
  std::pair<Region, std::size_t> ReadGrounding(const Tag& open) {
    auto close = NextTag(text_, open.end());
    if (!close) {
      throw ParseError(MalformedReason::kUnclosedSpan, open.offset,
                       "unclosed <box>");
    }
    std::optional<TaskKind> kind;
    TagRole role = Classify(close->name, kind);
    if (role == TagRole::kUnknown) ThrowUnknown(*close);
    if (role != TagRole::kBox || !close->closing) {
      throw ParseError(MalformedReason::kTagInGrounding, close->offset,
                       Describe(*close) + " inside <box>");
    }
    std::string_view interior =
        text_.substr(open.end(), close->offset - open.end());
    return {ParseInterior(interior, open.end()), close->end()};
  }

  // Returns the offset just past the closing task tag.
  std::size_t ReadTask(const Tag& open, TaskKind kind) {
    TaskSegment task;
    task.kind = kind;
    std::size_t pos = open.end();
    while (true) {
      auto tag = NextTag(text_, pos);
      if (!tag) {
        throw ParseError(MalformedReason::kUnclosedSpan, open.offset,
                         "unclosed " + Describe(open));
      }
      std::optional<TaskKind> inner;
      TagRole role = Classify(tag->name, inner);
      if (role == TagRole::kUnknown) ThrowUnknown(*tag);
      task.payload.append(text_.substr(pos, tag->offset - pos));
      if (role == TagRole::kBox) {
        if (tag->closing) {
          throw ParseError(MalformedReason::kUnmatchedClose, tag->offset,
                           "</box> without opener");
        }
        auto [region, box_end] = ReadGrounding(*tag);
        task.regions.push_back(region);
        pos = box_end;
        continue;
      }
      if (!tag->closing) {
        throw ParseError(MalformedReason::kNestedTask, tag->offset,
                         Describe(*tag) + " inside " + Describe(open));
      }
      if (*inner != kind) {
        throw ParseError(MalformedReason::kMismatchedClose, tag->offset,
                         Describe(*tag) + " closes " + Describe(open));
      }
      out_.emplace_back(std::move(task),
                        SourceSpan{open.offset, tag->end() - open.offset});
      return tag->end();
    }
  }

  std::string_view text_;
  std::vector<Segment> out_;
};

// Streaming helpers. Each handles one complete tag candidate.
void StreamHandleTag(StreamState& st, const Tag& tag,
                     std::vector<Segment>& out) {
  using Mode = StreamState::Mode;
  std::optional<TaskKind> kind;
  TagRole role = Classify(tag.name, kind);
  if (role == TagRole::kUnknown) ThrowUnknown(tag);
  std::size_t end = tag.end();

  switch (st.mode) {
    case Mode::kText: {
      if (tag.closing) {
        throw ParseError(MalformedReason::kUnmatchedClose, tag.offset,
                         "closing tag " + Describe(tag) + " without opener");
      }
      if (!st.text.empty()) {
        out.emplace_back(TextSegment{std::move(st.text)},
                         SourceSpan{st.text_start, tag.offset - st.text_start});
        st.text.clear();
      }
      if (role == TagRole::kBox) {
        st.mode = Mode::kGrounding;
        st.grounding_in_task = false;
        st.grounding_start = tag.offset;
        st.interior_start = end;
        st.grounding_interior.clear();
      } else {
        st.mode = Mode::kTask;
        st.task = TaskSegment{*kind, {}, {}};
        st.task_start = tag.offset;
      }
      return;
    }
    case Mode::kTask: {
      if (role == TagRole::kBox) {
        if (tag.closing) {
          throw ParseError(MalformedReason::kUnmatchedClose, tag.offset,
                           "</box> without opener");
        }
        st.mode = Mode::kGrounding;
        st.grounding_in_task = true;
        st.grounding_start = tag.offset;
        st.interior_start = end;
        st.grounding_interior.clear();
        return;
      }
      Tag open{false, TaskKindTag(st.task.kind), st.task_start, 0};
      if (!tag.closing) {
        throw ParseError(MalformedReason::kNestedTask, tag.offset,
                         Describe(tag) + " inside " + Describe(open));
      }
      if (*kind != st.task.kind) {
        throw ParseError(MalformedReason::kMismatchedClose, tag.offset,
                         Describe(tag) + " closes " + Describe(open));
      }
      st.task.payload = std::move(st.text);
      st.text.clear();
      out.emplace_back(std::move(st.task),
                       SourceSpan{st.task_start, end - st.task_start});
      st.task = TaskSegment{};
      st.mode = Mode::kText;
      st.text_start = end;
      return;
    }
    case Mode::kGrounding: {
      if (role != TagRole::kBox || !tag.closing) {
        throw ParseError(MalformedReason::kTagInGrounding, tag.offset,
                         Describe(tag) + " inside <box>");
      }
      Region region = ParseInterior(st.grounding_interior, st.interior_start);
      st.grounding_interior.clear();
      if (st.grounding_in_task) {
        st.task.regions.push_back(region);
        st.mode = Mode::kTask;
      } else {
        out.emplace_back(GroundingSegment{region},
                         SourceSpan{st.grounding_start, end - st.grounding_start});
        st.mode = Mode::kText;
        st.text_start = end;
      }
      return;
    }
  }
}

void StreamAppendContent(StreamState& st, std::string_view chars) {
  if (st.mode == StreamState::Mode::kGrounding) {
    st.grounding_interior.append(chars);
  } else {
    st.text.append(chars);
  }
}

// Whether `buffer` (starting with '<') followed by `c` can still become a
// tag candidate.
bool ExtendsCandidate(const std::string& buffer, char c) {
  if (buffer.size() == 1) return c == '/' || IsAsciiLetter(c);
  if (buffer.size() == 2 && buffer[1] == '/') return IsAsciiLetter(c);
  return IsNameChar(c);
}

void StreamFeedChar(StreamState& st, char c, std::vector<Segment>& out) {
  std::size_t offset = st.consumed++;
  while (true) {
    if (st.tag_buffer.empty()) {
      if (c == '<') {
        st.tag_buffer.push_back(c);
        st.tag_start = offset;
      } else {
        StreamAppendContent(st, std::string_view(&c, 1));
      }
      return;
    }
    if (ExtendsCandidate(st.tag_buffer, c)) {
      st.tag_buffer.push_back(c);
      return;
    }
    bool in_name = st.tag_buffer.size() > 1 && st.tag_buffer.back() != '/';
    if (c == '>' && in_name) {
      st.tag_buffer.push_back(c);
      std::string buffer = std::move(st.tag_buffer);
      st.tag_buffer.clear();
      auto tag = LexTag(buffer, 0);
      tag->offset = st.tag_start;
      StreamHandleTag(st, *tag, out);
      return;
    }
    // Not a tag after all: the buffered bytes are content and `c` starts over.
    StreamAppendContent(st, st.tag_buffer);
    st.tag_buffer.clear();
  }
}

void StreamFinish(StreamState& st, std::vector<Segment>& out) {
  using Mode = StreamState::Mode;
  if (!st.tag_buffer.empty()) {
    StreamAppendContent(st, st.tag_buffer);
    st.tag_buffer.clear();
  }
  switch (st.mode) {
    case Mode::kText:
      if (!st.text.empty()) {
        out.emplace_back(TextSegment{std::move(st.text)},
                         SourceSpan{st.text_start, st.consumed - st.text_start});
        st.text.clear();
      }
      break;
    case Mode::kTask:
      throw ParseError(MalformedReason::kUnclosedSpan, st.task_start,
                       "unclosed <" + std::string(TaskKindTag(st.task.kind)) +
                           ">");
    case Mode::kGrounding:
      throw ParseError(MalformedReason::kUnclosedSpan, st.grounding_start,
                       "unclosed <box>");
  }
  st.finished = true;
}

bool HasTagCandidate(std::string_view s) { return NextTag(s, 0).has_value(); }

bool IsAllBlank(std::string_view s) {
  for (char c : s) {
    if (!IsBlank(c)) return false;
  }
  return true;
}

}  // namespace

std::string_view MalformedReasonName(MalformedReason reason) {
  switch (reason) {
    case MalformedReason::kUnknownTag: return "unknown_tag";
    case MalformedReason::kUnmatchedClose: return "unmatched_close";
    case MalformedReason::kMismatchedClose: return "mismatched_close";
    case MalformedReason::kNestedTask: return "nested_task";
    case MalformedReason::kTagInGrounding: return "tag_in_grounding";
    case MalformedReason::kUnclosedSpan: return "unclosed_span";
    case MalformedReason::kInvalidRegion: return "invalid_region";
  }
  return "unknown";
}

ParseError::ParseError(MalformedReason reason, std::size_t offset,
                       std::string detail)
    : Error(ErrorCode::kMalformedToken, std::move(detail), offset),
      reason_(reason) {}

ParsedMessage Parse(std::string_view text) {
  ParsedMessage msg;
  msg.segments = BatchParser(text).Run();
  msg.raw = std::string(text);
  return msg;
}

std::vector<Segment> ParseStream(std::string_view chunk, StreamState& state,
                                 bool end_of_input) {
  if (state.failure) throw *state.failure;
  if (state.finished) {
    if (chunk.empty()) return {};
    throw Error(ErrorCode::kInvalidInput, "stream already finished");
  }
  std::vector<Segment> out;
  try {
    for (char c : chunk) StreamFeedChar(state, c, out);
    if (end_of_input) StreamFinish(state, out);
  } catch (const ParseError& e) {
    state.failure = e;
    throw;
  }
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> FindTagCandidate(
    std::string_view text, std::size_t from) {
  if (auto tag = NextTag(text, from)) {
    return std::make_pair(tag->offset, tag->length);
  }
  return std::nullopt;
}

std::string Serialize(const std::vector<Segment>& segments) {
  std::string out;
  bool previous_was_text = false;
  for (const auto& seg : segments) {
    if (const auto* t = seg.text()) {
      if (t->content.empty()) {
        throw Error(ErrorCode::kInvalidSegment, "empty text segment");
      }
      if (previous_was_text) {
        throw Error(ErrorCode::kInvalidSegment, "adjacent text segments");
      }
      if (HasTagCandidate(t->content)) {
        throw Error(ErrorCode::kInvalidSegment, "text contains a tag");
      }
      out += t->content;
      previous_was_text = true;
      continue;
    }
    previous_was_text = false;
    if (const auto* task = seg.task()) {
      if (HasTagCandidate(task->payload)) {
        throw Error(ErrorCode::kInvalidSegment, "task payload contains a tag");
      }
      std::string_view tag = TaskKindTag(task->kind);
      out += '<';
      out += tag;
      out += '>';
      out += task->payload;
      for (const auto& r : task->regions) {
        if (!IsValidRegion(r)) {
          throw Error(ErrorCode::kInvalidSegment, "region violates bounds");
        }
        out += "<box>" + FormatRegion(r) + "</box>";
      }
      out += "</";
      out += tag;
      out += '>';
      continue;
    }
    const auto& g = *seg.grounding();
    if (!IsValidRegion(g.region)) {
      throw Error(ErrorCode::kInvalidSegment, "region violates bounds");
    }
    out += "<box>" + FormatRegion(g.region) + "</box>";
  }
  return out;
}

std::string Serialize(const ParsedMessage& msg) { return Serialize(msg.segments); }

std::string_view ViolationCodeName(ViolationCode code) {
  switch (code) {
    case ViolationCode::kMalformedToken: return "MalformedToken";
    case ViolationCode::kInvalidRegion: return "InvalidRegion";
    case ViolationCode::kMissingRegion: return "MissingRegion";
    case ViolationCode::kRoleOrder: return "RoleOrder";
  }
  return "MalformedToken";
}

std::optional<ViolationCode> ViolationCodeFromName(std::string_view name) {
  for (ViolationCode c :
       {ViolationCode::kMalformedToken, ViolationCode::kInvalidRegion,
        ViolationCode::kMissingRegion, ViolationCode::kRoleOrder}) {
    if (ViolationCodeName(c) == name) return c;
  }
  return std::nullopt;
}

RegionBinding BindRegions(const std::vector<Segment>& segments) {
  RegionBinding binding;
  std::vector<Region>* open_task = nullptr;
  for (const auto& seg : segments) {
    if (const auto* task = seg.task()) {
      binding.task_regions.push_back(task->regions);
      open_task = &binding.task_regions.back();
    } else if (const auto* g = seg.grounding()) {
      if (open_task) {
        open_task->push_back(g->region);
      } else {
        binding.standalone.push_back(g->region);
      }
    } else if (!IsAllBlank(seg.text()->content)) {
      open_task = nullptr;
    }
  }
  return binding;
}

std::vector<Violation> Validate(const ParsedMessage& msg) {
  std::vector<Violation> violations;
  RegionBinding binding = BindRegions(msg.segments);
  std::size_t task_index = 0;
  for (const auto& seg : msg.segments) {
    std::size_t offset = seg.span.offset;
    if (const auto* t = seg.text()) {
      if (auto tag = NextTag(t->content, 0)) {
        violations.push_back({ViolationCode::kMalformedToken,
                              offset + tag->offset,
                              "tag " + Describe(*tag) + " inside text"});
      }
    } else if (const auto* task = seg.task()) {
      if (auto tag = NextTag(task->payload, 0)) {
        violations.push_back({ViolationCode::kMalformedToken, offset,
                              "tag " + Describe(*tag) + " inside task payload"});
      }
      for (const auto& r : task->regions) {
        if (!IsValidRegion(r)) {
          violations.push_back({ViolationCode::kInvalidRegion, offset,
                                "region violates bounds"});
        }
      }
      if (RequiresRegion(task->kind) &&
          binding.task_regions[task_index].empty()) {
        violations.push_back(
            {ViolationCode::kMissingRegion, offset,
             std::string(TaskKindName(task->kind)) + " requires a region"});
      }
      ++task_index;
    } else if (!IsValidRegion(seg.grounding()->region)) {
      violations.push_back(
          {ViolationCode::kInvalidRegion, offset, "region violates bounds"});
    }
  }
  return violations;
}

Violation ViolationFromParseError(const ParseError& e) {
  ViolationCode code = e.reason() == MalformedReason::kInvalidRegion
                           ? ViolationCode::kInvalidRegion
                           : ViolationCode::kMalformedToken;
  return {code, e.offset(), e.detail()};
}

std::vector<Violation> ValidateText(std::string_view text) {
  try {
    return Validate(Parse(text));
  } catch (const ParseError& e) {
    return {ViolationFromParseError(e)};
  }
}

}  // namespace taskroute
