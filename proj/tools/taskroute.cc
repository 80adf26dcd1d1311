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

// taskroute: command-line front end.
//
//   taskroute validate --text S
//   taskroute replay --transcript F [--config C] [--out R]
//   taskroute serve [--config C] [--listen ADDR]
//   taskroute build --input F --templates D --turns N --seed S --out F
//   taskroute filter --input F --report R [--out F]
//   taskroute stats --input F
//   taskroute expert-stub [--listen ADDR] [--seed S] [--fail-first N]
//
// Exit status: 0 success, 1 rejected input, 2 usage or configuration error.

#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "taskroute/config.h"
#include "taskroute/dataset.h"
#include "taskroute/error.h"
#include "taskroute/expert_stub.h"
#include "taskroute/orchestrator.h"
#include "taskroute/service.h"
#include "taskroute/token_protocol.h"

namespace {

using taskroute::Json;

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw taskroute::Error(taskroute::ErrorCode::kIo, "cannot open " + path);
  return in;
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw taskroute::Error(taskroute::ErrorCode::kIo, "cannot write " + path);
}

struct ConfigFlags {
  std::string file;
  std::string state_dir;
  std::string listen;
  std::string log_level;

  taskroute::Config Load() const {
    taskroute::ConfigOverrides o;
    if (!state_dir.empty()) o.state_dir = state_dir;
    if (!listen.empty()) o.listen = listen;
    if (!log_level.empty()) o.log_level = log_level;
    std::optional<std::filesystem::path> path;
    if (!file.empty()) path = file;
    taskroute::Config c = taskroute::LoadConfig(path, o);
    spdlog::set_level(spdlog::level::from_str(c.log_level));
    return c;
  }
};

void AddConfigFlags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.file, "Configuration file (JSON)");
  cmd->add_option("--state-dir", f.state_dir, "Directory for sessions and artifacts");
  cmd->add_option("--log-level", f.log_level, "trace|debug|info|warn|error|off");
}

taskroute::Service* g_service = nullptr;
taskroute::ExpertStub* g_stub = nullptr;

void OnSignal(int) {
  if (g_service) g_service->Stop();
  if (g_stub) g_stub->Stop();
}

int Validate(const std::string& text) {
  auto violations = taskroute::ValidateText(text);
  std::cout << Json{{"valid", violations.empty()}, {"violations", violations}}.dump(2)
            << "\n";
  return violations.empty() ? 0 : 1;
}

int Replay(const std::string& transcript, const std::string& out, const ConfigFlags& flags) {
  taskroute::Config config = flags.Load();
  auto in = OpenInput(transcript);
  taskroute::RunReport report = taskroute::RunTranscript(taskroute::ReadTranscriptJsonl(in), config);
  WriteOutput(out, Json(report).dump(2) + "\n");
  return 0;
}

int Serve(const ConfigFlags& flags) {
  taskroute::Config config = flags.Load();
  auto addr = taskroute::ParseListen(config.listen);
  taskroute::Service service(config);
  int port = service.Bind(addr.host, addr.port);
  spdlog::info("listening on {}:{} (state in {})", addr.host, port, config.state_dir.string());
  g_service = &service;
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  service.Run();
  g_service = nullptr;
  return 0;
}

int Build(const std::string& input, const std::string& templates, std::size_t turns,
          std::uint64_t seed, const std::string& out) {
  auto set = taskroute::TemplateSet::LoadDirectory(templates);
  auto in = OpenInput(input);
  std::vector<taskroute::ConversationRecord> records;
  for (const auto& sample : taskroute::ReadSamplesJsonl(in)) {
    records.push_back(taskroute::BuildMultiturn(sample, turns, seed, set));
  }
  std::ostringstream buffer;
  taskroute::WriteRecordsJsonl(buffer, records);
  WriteOutput(out, buffer.str());
  spdlog::info("built {} records", records.size());
  return 0;
}

int Filter(const std::string& input, const std::string& report_path, const std::string& out) {
  auto in = OpenInput(input);
  auto records = taskroute::ReadRecordsJsonl(in);
  std::vector<taskroute::ConversationRecord> kept;
  auto report = taskroute::FilterRecords(records, &kept);
  WriteOutput(report_path, Json(report).dump(2) + "\n");
  if (!out.empty()) {
    std::ostringstream buffer;
    taskroute::WriteRecordsJsonl(buffer, kept);
    WriteOutput(out, buffer.str());
  }
  spdlog::info("kept {} of {}", report.kept, report.input);
  return 0;
}

int Stats(const std::string& input) {
  auto in = OpenInput(input);
  std::cout << Json(taskroute::ComputeStats(taskroute::ReadRecordsJsonl(in))).dump(2) << "\n";
  return 0;
}

int Stub(const std::string& listen, std::uint64_t seed, int fail_first) {
  auto addr = taskroute::ParseListen(listen);
  taskroute::StubOptions options;
  options.backend.seed = seed;
  options.fail_first_n = fail_first;
  taskroute::ExpertStub stub(options);
  g_stub = &stub;
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  spdlog::info("expert stub on {}:{}", addr.host, addr.port);
  stub.Serve(addr.host, addr.port);
  g_stub = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-token routing toolkit"};
  app.require_subcommand(1);

  std::string text;
  auto* validate = app.add_subcommand("validate", "Check a model reply against the token grammar");
  validate->add_option("--text", text, "Reply text")->required();

  ConfigFlags replay_flags;
  std::string transcript, report_out;
  auto* replay = app.add_subcommand("replay", "Replay a transcript and write a run report");
  replay->add_option("--transcript", transcript, "Transcript JSONL")->required();
  replay->add_option("--out", report_out, "Report path (stdout if omitted)");
  AddConfigFlags(replay, replay_flags);

  ConfigFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  AddConfigFlags(serve, serve_flags);
  serve->add_option("--listen", serve_flags.listen, "host:port");

  std::string build_input, build_templates, build_out;
  std::size_t build_turns = 2;
  std::uint64_t build_seed = 0;
  auto* build = app.add_subcommand("build", "Build multi-turn conversation records");
  build->add_option("--input", build_input, "AnnotatedSample JSONL")->required();
  build->add_option("--templates", build_templates, "Template directory")->required();
  build->add_option("--turns", build_turns, "Exchanges per record")->check(CLI::PositiveNumber);
  build->add_option("--seed", build_seed, "Sampling seed");
  build->add_option("--out", build_out, "Output JSONL")->required();

  std::string filter_input, filter_report, filter_out;
  auto* filter = app.add_subcommand("filter", "Drop records that violate the token grammar");
  filter->add_option("--input", filter_input, "ConversationRecord JSONL")->required();
  filter->add_option("--report", filter_report, "FilterReport JSON path")->required();
  filter->add_option("--out", filter_out, "Kept records JSONL");

  std::string stats_input;
  auto* stats = app.add_subcommand("stats", "Summarize a record file");
  stats->add_option("--input", stats_input, "ConversationRecord JSONL")->required();

  std::string stub_listen = "127.0.0.1:9000";
  std::uint64_t stub_seed = 0;
  int stub_fail = 0;
  auto* stub = app.add_subcommand("expert-stub", "Serve mock outputs over the remote expert protocol");
  stub->add_option("--listen", stub_listen, "host:port");
  stub->add_option("--seed", stub_seed, "Mock seed");
  stub->add_option("--fail-first", stub_fail, "Answer the first N requests with 503");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return Validate(text);
    if (*replay) return Replay(transcript, report_out, replay_flags);
    if (*serve) return Serve(serve_flags);
    if (*build) return Build(build_input, build_templates, build_turns, build_seed, build_out);
    if (*filter) return Filter(filter_input, filter_report, filter_out);
    if (*stats) return Stats(stats_input);
    if (*stub) return Stub(stub_listen, stub_seed, stub_fail);
  } catch (const taskroute::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    bool config = e.code() == taskroute::ErrorCode::kInvalidConfig ||
                  e.code() == taskroute::ErrorCode::kInvalidDescriptor ||
                  e.code() == taskroute::ErrorCode::kDuplicateKind;
    return config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
