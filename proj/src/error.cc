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

#include "taskroute/error.h"

#include <utility>

namespace taskroute {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedToken: return "MalformedToken";
    case ErrorCode::kInvalidRegion: return "InvalidRegion";
    case ErrorCode::kInvalidSegment: return "InvalidSegment";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kValidationFailed: return "ValidationFailed";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kNoExpertRegistered: return "NoExpertRegistered";
    case ErrorCode::kDuplicateKind: return "DuplicateKind";
    case ErrorCode::kInvalidDescriptor: return "InvalidDescriptor";
    case ErrorCode::kSessionMismatch: return "SessionMismatch";
    case ErrorCode::kRemoteTimeout: return "RemoteTimeout";
    case ErrorCode::kTemplateMissing: return "TemplateMissing";
    case ErrorCode::kRegionRequired: return "RegionRequired";
    case ErrorCode::kInsufficientCaptions: return "InsufficientCaptions";
    case ErrorCode::kCorruptState: return "CorruptState";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

std::string FormatWhat(ErrorCode code, const std::string& detail,
                       std::size_t offset) {
  std::string what(ErrorCodeName(code));
  if (offset != Error::npos) {
    what += " at byte " + std::to_string(offset);
  }
  if (!detail.empty()) {
    what += ": " + detail;
  }
  return what;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail, std::size_t offset)
    : std::runtime_error(FormatWhat(code, detail, offset)),
      code_(code),
      detail_(std::move(detail)),
      offset_(offset) {}

}  // namespace taskroute
