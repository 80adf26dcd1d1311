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

#ifndef TASKROUTE_ERROR_H_
#define TASKROUTE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace taskroute {

enum class ErrorCode {
  kMalformedToken,
  kInvalidRegion,
  kInvalidSegment,
  kShapeMismatch,
  kNonFiniteGradient,
  kValidationFailed,
  kMissingArtifact,
  kNoExpertRegistered,
  kDuplicateKind,
  kInvalidDescriptor,
  kSessionMismatch,
  kRemoteTimeout,
  kTemplateMissing,
  kRegionRequired,
  kInsufficientCaptions,
  kCorruptState,
  kInvalidConfig,
  kInvalidInput,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Base exception for every failure the library reports. `offset` is a byte
// offset into the input being parsed when one applies, npos otherwise.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorCode code, std::string detail, std::size_t offset = npos);

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }
  std::size_t offset() const { return offset_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::size_t offset_;
};

}  // namespace taskroute

#endif  // TASKROUTE_ERROR_H_
