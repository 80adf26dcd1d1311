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

#ifndef TASKROUTE_TASK_KIND_H_
#define TASKROUTE_TASK_KIND_H_

#include <array>
#include <optional>
#include <string_view>

namespace taskroute {

enum class TaskKind {
  kImageGen,
  kLayoutGen,
  kImageEditGlobal,
  kImageEditRegion,
  kImageSeg,
  kVideoSeg,
  kVideoGen,
  kVideoEdit,
  kImageToVideo,
  kAudioGen,
};

inline constexpr std::array<TaskKind, 10> kAllTaskKinds = {
    TaskKind::kImageGen,        TaskKind::kLayoutGen,
    TaskKind::kImageEditGlobal, TaskKind::kImageEditRegion,
    TaskKind::kImageSeg,        TaskKind::kVideoSeg,
    TaskKind::kVideoGen,        TaskKind::kVideoEdit,
    TaskKind::kImageToVideo,    TaskKind::kAudioGen,
};

// What an expert produces or consumes.
enum class MediaKind { kImage, kVideo, kAudio, kMask, kLayout };

// Per-session slots holding the most recent artifact of a modality.
enum class ArtifactSlot { kCurrentImage, kCurrentVideo, kCurrentAudio };

// Identifier used in JSON and config files, e.g. "ImageEditRegion".
std::string_view TaskKindName(TaskKind kind);
std::optional<TaskKind> TaskKindFromName(std::string_view name);

// Tag name used in model output, e.g. "Edit" for <Edit>...</Edit>.
std::string_view TaskKindTag(TaskKind kind);
std::optional<TaskKind> TaskKindFromTag(std::string_view tag);

// Tag name of grounding tokens: <box>[x1,y1,x2,y2]</box>.
inline constexpr std::string_view kGroundingTag = "box";

// Kinds that cannot execute without at least one region.
bool RequiresRegion(TaskKind kind);

// Slot the task reads its input from, if it consumes an existing artifact.
std::optional<ArtifactSlot> InputSlot(TaskKind kind);

MediaKind OutputMedia(TaskKind kind);

// Slot an artifact of this media kind overwrites; masks and layouts have none.
std::optional<ArtifactSlot> SlotForMedia(MediaKind media);
MediaKind SlotMedia(ArtifactSlot slot);

std::string_view MediaKindName(MediaKind media);
std::optional<MediaKind> MediaKindFromName(std::string_view name);

std::string_view ArtifactSlotName(ArtifactSlot slot);
std::optional<ArtifactSlot> ArtifactSlotFromName(std::string_view name);

}  // namespace taskroute

#endif  // TASKROUTE_TASK_KIND_H_
