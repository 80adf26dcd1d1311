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

#ifndef TASKROUTE_DATASET_H_
#define TASKROUTE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taskroute/json_io.h"
#include "taskroute/region.h"
#include "taskroute/task_kind.h"
#include "taskroute/token_protocol.h"

namespace taskroute {

struct Caption {
  std::string text;
  std::optional<Region> box;

  friend bool operator==(const Caption&, const Caption&) = default;
};

// One annotated image, e.g. a grounding model's captions with boxes.
struct AnnotatedSample {
  std::string image_ref;
  std::vector<Caption> captions;
  TaskKind source_task = TaskKind::kImageSeg;
  std::string source_dataset;

  friend bool operator==(const AnnotatedSample&,
                         const AnnotatedSample&) = default;
};

enum class Role { kUser, kAssistant };

struct Turn {
  Role role = Role::kUser;
  std::string content;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct ConversationRecord {
  std::string id;
  std::vector<Turn> turns;
  std::set<TaskKind> task_kinds;
  std::vector<std::string> template_ids;  // provenance, one per exchange

  friend bool operator==(const ConversationRecord&,
                         const ConversationRecord&) = default;
};

// A user/assistant exchange pattern. "{caption}" is replaced by the caption
// text and "{box}" by the caption's grounding token.
struct ConversationTemplate {
  std::string id;
  TaskKind task = TaskKind::kImageGen;
  std::string user;
  std::string assistant;

  bool needs_region() const;
};

class TemplateSet {
 public:
  // Throws Error(kInvalidConfig) for duplicate ids or a template whose
  // rendered assistant turn would not validate.
  void Add(ConversationTemplate t);

  const ConversationTemplate* Find(const std::string& id) const;
  const std::vector<ConversationTemplate>& templates() const { return all_; }

  // Loads every *.json file in `dir` (sorted by name). Each file holds
  // {"templates": [{"id", "task", "user", "assistant"}, ...]}.
  static TemplateSet LoadDirectory(const std::filesystem::path& dir);

 private:
  std::vector<ConversationTemplate> all_;
};

// Two-turn record for `sample` rendered with template `template_id`, using
// the first caption the template can use.
// Throws Error(kTemplateMissing) if the id is unknown or its task differs
// from sample.source_task, Error(kInsufficientCaptions) without captions,
// Error(kRegionRequired) if the template needs a box no caption has.
ConversationRecord ConvertSample(const AnnotatedSample& sample,
                                 const TemplateSet& templates,
                                 const std::string& template_id);

// Seeded multi-turn, multi-task dialogue. Turn t uses the template's
// compatible captions round-robin starting from the first, so a one-turn
// build equals ConvertSample with the sampled template. Consecutive turns
// use different task kinds whenever another applicable template exists.
// Throws Error(kInsufficientCaptions) or Error(kInvalidInput) for n_turns 0.
ConversationRecord BuildMultiturn(const AnnotatedSample& sample,
                                  std::size_t n_turns, std::uint64_t seed,
                                  const TemplateSet& templates);

struct Rejection {
  std::string record_id;
  std::size_t turn = 0;
  Violation violation;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct FilterReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::vector<Rejection> rejected;
};

// First problem in the record: role order, then parse/validate of each
// assistant turn, scanning turns in order.
std::optional<Rejection> CheckRecord(const ConversationRecord& record);

// Keeps a record iff roles alternate starting with the user and every
// assistant turn parses and validates cleanly. Kept records are appended to
// `kept` when given.
FilterReport FilterRecords(const std::vector<ConversationRecord>& records,
                           std::vector<ConversationRecord>* kept = nullptr);

enum class FaultKind { kTagDrop, kBoundBreak, kRoleSwap };

struct InjectedFault {
  ConversationRecord record;
  ViolationCode expected;
  std::size_t turn = 0;
};

// Corrupts a record that passes the filter so that its first violation is
// known: a dropped closing task tag (MalformedToken), a coordinate pushed
// past 1 (InvalidRegion) or swapped opening roles (RoleOrder).
// Throws Error(kInvalidInput) if the record is too short for the fault.
InjectedFault InjectFault(const ConversationRecord& record, FaultKind kind,
                          std::uint64_t seed);

struct DatasetStats {
  std::size_t records = 0;
  std::map<TaskKind, std::size_t> kind_counts;  // records containing the kind
  std::map<std::size_t, std::size_t> turn_histogram;
  std::map<std::size_t, std::size_t> region_histogram;

  void Merge(const DatasetStats& other);
};

DatasetStats ComputeStats(const std::vector<ConversationRecord>& records);

void to_json(Json& j, const Caption& c);
void from_json(const Json& j, Caption& c);
void to_json(Json& j, const AnnotatedSample& s);
void from_json(const Json& j, AnnotatedSample& s);
void to_json(Json& j, const ConversationRecord& r);
void from_json(const Json& j, ConversationRecord& r);
void to_json(Json& j, const FilterReport& r);
void to_json(Json& j, const DatasetStats& s);

inline constexpr const char* kConversationSchema = "taskroute.conversation";
inline constexpr int kConversationSchemaVersion = 1;

std::vector<AnnotatedSample> ReadSamplesJsonl(std::istream& in);
// Writes the schema header line followed by one record per line.
void WriteRecordsJsonl(std::ostream& out,
                       const std::vector<ConversationRecord>& records);
// Accepts input with or without the header line.
std::vector<ConversationRecord> ReadRecordsJsonl(std::istream& in);

}  // namespace taskroute

#endif  // TASKROUTE_DATASET_H_
