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

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <string_view>

#include "taskroute/artifact.h"
#include "taskroute/error.h"
#include "taskroute/hash.h"

namespace taskroute {
namespace {

constexpr std::string_view kCaptionSlot = "{caption}";
constexpr std::string_view kBoxSlot = "{box}";

std::string GroundingToken(const Region& r) {
  return "<box>" + FormatRegion(r) + "</box>";
}

// Single pass so substituted text is never rescanned for placeholders.
std::string Render(std::string_view pattern, const Caption& caption) {
  std::string out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    if (pattern.substr(pos, kCaptionSlot.size()) == kCaptionSlot) {
      out += caption.text;
      pos += kCaptionSlot.size();
    } else if (pattern.substr(pos, kBoxSlot.size()) == kBoxSlot) {
      out += GroundingToken(*caption.box);
      pos += kBoxSlot.size();
    } else {
      out.push_back(pattern[pos++]);
    }
  }
  return out;
}

bool UsesCaption(const ConversationTemplate& t, const Caption& c) {
  return !t.needs_region() || c.box.has_value();
}

std::vector<const Caption*> CompatibleCaptions(const ConversationTemplate& t,
                                               const AnnotatedSample& s) {
  std::vector<const Caption*> out;
  for (const auto& c : s.captions) {
    if (UsesCaption(t, c)) out.push_back(&c);
  }
  return out;
}

void CheckCaptions(const AnnotatedSample& s) {
  if (s.captions.empty()) {
    throw Error(ErrorCode::kInsufficientCaptions,
                "sample '" + s.image_ref + "' has no captions");
  }
  for (const auto& c : s.captions) {
    if (FindTagCandidate(c.text)) {
      throw Error(ErrorCode::kInvalidInput,
                  "caption contains a tag: '" + c.text + "'");
    }
    if (c.box && !IsValidRegion(*c.box)) {
      throw Error(ErrorCode::kInvalidRegion, "caption box violates bounds");
    }
  }
}

std::set<TaskKind> KindsIn(const std::vector<Turn>& turns) {
  std::set<TaskKind> kinds;
  for (const auto& t : turns) {
    if (t.role != Role::kAssistant) continue;
    try {
      for (const auto& seg : Parse(t.content).segments) {
        if (const auto* task = seg.task()) kinds.insert(task->kind);
      }
    } catch (const ParseError&) {
    }
  }
  return kinds;
}

std::string RecordId(std::string_view prefix, const Json& provenance) {
  return std::string(prefix) + Sha256Hex(provenance.dump()).substr(0, 16);
}

void AppendExchange(ConversationRecord& record, const ConversationTemplate& t,
                    const Caption& caption) {
  record.turns.push_back({Role::kUser, Render(t.user, caption)});
  record.turns.push_back({Role::kAssistant, Render(t.assistant, caption)});
  record.template_ids.push_back(t.id);
}

}  // namespace

bool ConversationTemplate::needs_region() const {
  return assistant.find(kBoxSlot) != std::string::npos ||
         user.find(kBoxSlot) != std::string::npos;
}

void TemplateSet::Add(ConversationTemplate t) {
  if (t.id.empty()) throw Error(ErrorCode::kInvalidConfig, "template without id");
  if (Find(t.id)) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate template id '" + t.id + "'");
  }
  Caption probe{"probe", Region{0.1, 0.2, 0.6, 0.7}};
  std::string rendered = Render(t.assistant, probe);
  auto violations = ValidateText(rendered);
  if (!violations.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "template '" + t.id + "' renders an invalid reply: " +
                    violations.front().detail);
  }
  bool has_task = false;
  for (const auto& seg : Parse(rendered).segments) {
    if (const auto* task = seg.task(); task && task->kind == t.task) has_task = true;
  }
  if (!has_task) {
    throw Error(ErrorCode::kInvalidConfig,
                "template '" + t.id + "' never emits <" +
                    std::string(TaskKindTag(t.task)) + ">");
  }
  all_.push_back(std::move(t));
}

const ConversationTemplate* TemplateSet::Find(const std::string& id) const {
  for (const auto& t : all_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

TemplateSet TemplateSet::LoadDirectory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot list " + dir.string());
  std::sort(files.begin(), files.end());

  TemplateSet set;
  for (const auto& file : files) {
    Json j = Json::parse(ReadFile(file), nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kInvalidConfig, file.string() + " is not JSON");
    }
    for (const auto& t : Field<Json>(j, "templates")) {
      set.Add(ConversationTemplate{Field<std::string>(t, "id"),
                                   Field<TaskKind>(t, "task"),
                                   Field<std::string>(t, "user"),
                                   Field<std::string>(t, "assistant")});
    }
  }
  return set;
}

ConversationRecord ConvertSample(const AnnotatedSample& sample,
                                 const TemplateSet& templates,
                                 const std::string& template_id) {
  const ConversationTemplate* t = templates.Find(template_id);
  if (!t) {
    throw Error(ErrorCode::kTemplateMissing, "no template '" + template_id + "'");
  }
  if (t->task != sample.source_task) {
    throw Error(ErrorCode::kTemplateMissing,
                "template '" + template_id + "' is for " +
                    std::string(TaskKindName(t->task)) + ", sample is " +
                    std::string(TaskKindName(sample.source_task)));
  }
  CheckCaptions(sample);
  auto usable = CompatibleCaptions(*t, sample);
  if (usable.empty()) {
    throw Error(ErrorCode::kRegionRequired,
                "template '" + template_id + "' needs a caption with a box");
  }
  ConversationRecord record;
  AppendExchange(record, *t, *usable.front());
  record.task_kinds = KindsIn(record.turns);
  record.id = RecordId("conv-", Json{{"sample", sample}, {"template", template_id}});
  return record;
}

ConversationRecord BuildMultiturn(const AnnotatedSample& sample,
                                  std::size_t n_turns, std::uint64_t seed,
                                  const TemplateSet& templates) {
  if (n_turns == 0) throw Error(ErrorCode::kInvalidInput, "n_turns must be >= 1");
  CheckCaptions(sample);

  Json provenance{{"sample", sample}, {"turns", n_turns}, {"seed", seed}};
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(std::hash<std::string>{}(
                        Sha256Hex(provenance.dump())))};
  std::mt19937_64 rng(seq);

  ConversationRecord record;
  bool have_video = false;
  std::optional<TaskKind> previous;
  for (std::size_t turn = 0; turn < n_turns; ++turn) {
    std::vector<const ConversationTemplate*> applicable;
    for (const auto& t : templates.templates()) {
      if (CompatibleCaptions(t, sample).empty()) continue;
      auto slot = InputSlot(t.task);
      if (slot == ArtifactSlot::kCurrentVideo && !have_video) continue;
      applicable.push_back(&t);
    }
    auto keep_if = [&](auto pred) {
      std::vector<const ConversationTemplate*> subset;
      std::copy_if(applicable.begin(), applicable.end(), std::back_inserter(subset),
                   pred);
      if (!subset.empty()) applicable = std::move(subset);
    };
    if (turn == 0) {
      keep_if([&](const ConversationTemplate* t) { return t->task == sample.source_task; });
    } else if (previous) {
      keep_if([&](const ConversationTemplate* t) { return t->task != *previous; });
    }
    if (applicable.empty()) {
      throw Error(ErrorCode::kTemplateMissing,
                  "no template applies to sample '" + sample.image_ref + "'");
    }
    const ConversationTemplate& pick = *applicable[rng() % applicable.size()];
    auto usable = CompatibleCaptions(pick, sample);
    AppendExchange(record, pick, *usable[turn % usable.size()]);
    previous = pick.task;
    if (OutputMedia(pick.task) == MediaKind::kVideo) have_video = true;
  }
  record.task_kinds = KindsIn(record.turns);
  record.id = RecordId("mt-", provenance);
  return record;
}

std::optional<Rejection> CheckRecord(const ConversationRecord& record) {
  if (record.turns.empty()) {
    return Rejection{record.id, 0,
                     {ViolationCode::kRoleOrder, 0, "record has no turns"}};
  }
  for (std::size_t i = 0; i < record.turns.size(); ++i) {
    const Turn& turn = record.turns[i];
    Role expected = i % 2 == 0 ? Role::kUser : Role::kAssistant;
    if (turn.role != expected) {
      return Rejection{record.id, i,
                       {ViolationCode::kRoleOrder, 0,
                        std::string("turn ") + std::to_string(i) + " should be " +
                            (expected == Role::kUser ? "user" : "assistant")}};
    }
    if (turn.role == Role::kAssistant) {
      auto violations = ValidateText(turn.content);
      if (!violations.empty()) return Rejection{record.id, i, violations.front()};
    }
  }
  return std::nullopt;
}

FilterReport FilterRecords(const std::vector<ConversationRecord>& records,
                           std::vector<ConversationRecord>* kept) {
  FilterReport report;
  report.input = records.size();
  for (const auto& record : records) {
    if (auto rejection = CheckRecord(record)) {
      report.rejected.push_back(std::move(*rejection));
    } else {
      ++report.kept;
      if (kept) kept->push_back(record);
    }
  }
  return report;
}

InjectedFault InjectFault(const ConversationRecord& record, FaultKind kind,
                          std::uint64_t seed) {
  if (CheckRecord(record)) {
    throw Error(ErrorCode::kInvalidInput, "fault injection needs a clean record");
  }
  std::mt19937_64 rng(seed);
  InjectedFault fault{record, ViolationCode::kRoleOrder, 0};
  auto& turns = fault.record.turns;

  std::vector<std::size_t> assistant;
  for (std::size_t i = 1; i < turns.size(); i += 2) assistant.push_back(i);

  switch (kind) {
    case FaultKind::kRoleSwap: {
      if (turns.size() < 2) {
        throw Error(ErrorCode::kInvalidInput, "role swap needs two turns");
      }
      std::swap(turns[0].role, turns[1].role);
      fault.expected = ViolationCode::kRoleOrder;
      fault.turn = 0;
      fault.record.id += "-roleswap";
      break;
    }
    case FaultKind::kTagDrop: {
      struct Site {
        std::size_t turn, offset, length;
      };
      std::vector<Site> sites;
      for (std::size_t i : assistant) {
        const std::string& text = turns[i].content;
        std::size_t pos = 0;
        while (auto tag = FindTagCandidate(text, pos)) {
          auto [offset, length] = *tag;
          std::string_view name(text.data() + offset + 2, length - 3);
          if (text[offset + 1] == '/' && TaskKindFromTag(name)) {
            sites.push_back({i, offset, length});
            break;
          }
          pos = offset + length;
        }
      }
      if (sites.empty()) {
        throw Error(ErrorCode::kInvalidInput, "no closing task tag to drop");
      }
      const Site& site = sites[rng() % sites.size()];
      turns[site.turn].content.erase(site.offset, site.length);
      fault.expected = ViolationCode::kMalformedToken;
      fault.turn = site.turn;
      fault.record.id += "-tagdrop";
      break;
    }
    case FaultKind::kBoundBreak: {
      if (assistant.empty()) {
        throw Error(ErrorCode::kInvalidInput, "no assistant turn to corrupt");
      }
      constexpr std::string_view kBroken = "[0.100,0.100,1.500,0.900]";
      std::vector<std::size_t> with_box;
      for (std::size_t i : assistant) {
        if (turns[i].content.find("<box>") != std::string::npos) with_box.push_back(i);
      }
      if (with_box.empty()) {
        std::size_t i = assistant[rng() % assistant.size()];
        turns[i].content += "<box>" + std::string(kBroken) + "</box>";
        fault.turn = i;
      } else {
        std::size_t i = with_box[rng() % with_box.size()];
        std::string& text = turns[i].content;
        std::size_t open = text.find("<box>") + 5;
        std::size_t close = text.find("</box>", open);
        text.replace(open, close - open, kBroken);
        fault.turn = i;
      }
      fault.expected = ViolationCode::kInvalidRegion;
      fault.record.id += "-boundbreak";
      break;
    }
  }
  return fault;
}

void DatasetStats::Merge(const DatasetStats& other) {
  records += other.records;
  for (const auto& [k, v] : other.kind_counts) kind_counts[k] += v;
  for (const auto& [k, v] : other.turn_histogram) turn_histogram[k] += v;
  for (const auto& [k, v] : other.region_histogram) region_histogram[k] += v;
}

DatasetStats ComputeStats(const std::vector<ConversationRecord>& records) {
  DatasetStats stats;
  for (TaskKind kind : kAllTaskKinds) stats.kind_counts[kind] = 0;
  for (const auto& record : records) {
    ++stats.records;
    ++stats.turn_histogram[record.turns.size()];
    std::set<TaskKind> kinds;
    std::size_t regions = 0;
    bool parsed = true;
    for (const auto& turn : record.turns) {
      if (turn.role != Role::kAssistant) continue;
      try {
        for (const auto& seg : Parse(turn.content).segments) {
          if (const auto* task = seg.task()) {
            kinds.insert(task->kind);
            regions += task->regions.size();
          } else if (seg.grounding()) {
            ++regions;
          }
        }
      } catch (const ParseError&) {
        parsed = false;
      }
    }
    if (!parsed) kinds.insert(record.task_kinds.begin(), record.task_kinds.end());
    for (TaskKind kind : kinds) ++stats.kind_counts[kind];
    ++stats.region_histogram[regions];
  }
  return stats;
}

void to_json(Json& j, const Caption& c) {
  j = Json{{"text", c.text}};
  if (c.box) j["box"] = *c.box;
}

void from_json(const Json& j, Caption& c) {
  c.text = Field<std::string>(j, "text");
  c.box.reset();
  if (j.contains("box") && !j.at("box").is_null()) c.box = Field<Region>(j, "box");
}

void to_json(Json& j, const AnnotatedSample& s) {
  j = Json{{"image_ref", s.image_ref},
           {"captions", s.captions},
           {"source_task", s.source_task},
           {"source_dataset", s.source_dataset}};
}

void from_json(const Json& j, AnnotatedSample& s) {
  s.image_ref = Field<std::string>(j, "image_ref");
  s.captions = Field<std::vector<Caption>>(j, "captions");
  s.source_task = Field<TaskKind>(j, "source_task");
  s.source_dataset = FieldOr<std::string>(j, "source_dataset", "");
}

void to_json(Json& j, const ConversationRecord& r) {
  Json turns = Json::array();
  for (const auto& t : r.turns) {
    turns.push_back(Json{{"role", t.role == Role::kUser ? "user" : "assistant"},
                         {"content", t.content}});
  }
  j = Json{{"id", r.id},
           {"turns", turns},
           {"task_kinds", r.task_kinds},
           {"template_ids", r.template_ids}};
}

void from_json(const Json& j, ConversationRecord& r) {
  r.id = Field<std::string>(j, "id");
  r.turns.clear();
  for (const auto& t : Field<Json>(j, "turns")) {
    std::string role = Field<std::string>(t, "role");
    if (role != "user" && role != "assistant") {
      throw Error(ErrorCode::kInvalidInput, "unknown role '" + role + "'");
    }
    r.turns.push_back({role == "user" ? Role::kUser : Role::kAssistant,
                       Field<std::string>(t, "content")});
  }
  r.task_kinds = FieldOr<std::set<TaskKind>>(j, "task_kinds", {});
  r.template_ids = FieldOr<std::vector<std::string>>(j, "template_ids", {});
}

void to_json(Json& j, const FilterReport& r) {
  Json rejected = Json::array();
  for (const auto& rej : r.rejected) {
    rejected.push_back(
        Json{{"id", rej.record_id}, {"turn", rej.turn}, {"violation", rej.violation}});
  }
  j = Json{{"input", r.input}, {"kept", r.kept}, {"rejected", rejected}};
}

void to_json(Json& j, const DatasetStats& s) {
  Json kinds = Json::object();
  for (const auto& [k, v] : s.kind_counts) kinds[std::string(TaskKindName(k))] = v;
  Json turns = Json::object();
  for (const auto& [k, v] : s.turn_histogram) turns[std::to_string(k)] = v;
  Json regions = Json::object();
  for (const auto& [k, v] : s.region_histogram) regions[std::to_string(k)] = v;
  j = Json{{"records", s.records},
           {"kind_counts", kinds},
           {"turn_histogram", turns},
           {"region_histogram", regions}};
}

namespace {

template <typename Fn>
void ForEachJsonLine(std::istream& in, Fn fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kInvalidInput,
                  "line " + std::to_string(number) + " is not JSON");
    }
    try {
      fn(j);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(number) + ": " + e.detail());
    }
  }
}

}  // namespace

std::vector<AnnotatedSample> ReadSamplesJsonl(std::istream& in) {
  std::vector<AnnotatedSample> out;
  ForEachJsonLine(in, [&](const Json& j) { out.push_back(j.get<AnnotatedSample>()); });
  return out;
}

void WriteRecordsJsonl(std::ostream& out,
                       const std::vector<ConversationRecord>& records) {
  out << Json{{"schema", kConversationSchema}, {"version", kConversationSchemaVersion}}
             .dump()
      << "\n";
  for (const auto& r : records) out << Json(r).dump() << "\n";
}

std::vector<ConversationRecord> ReadRecordsJsonl(std::istream& in) {
  std::vector<ConversationRecord> out;
  ForEachJsonLine(in, [&](const Json& j) {
    if (j.contains("schema")) {
      if (Field<std::string>(j, "schema") != kConversationSchema ||
          Field<int>(j, "version") != kConversationSchemaVersion) {
        throw Error(ErrorCode::kInvalidInput, "unsupported record schema");
      }
      return;
    }
    out.push_back(j.get<ConversationRecord>());
  });
  return out;
}

}  // namespace taskroute
