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

#include "taskroute/task_kind.h"

namespace taskroute {
namespace {

struct KindInfo {
  TaskKind kind;
  std::string_view name;
  std::string_view tag;
  bool requires_region;
  std::optional<ArtifactSlot> input;
  MediaKind output;
};

constexpr KindInfo kKindTable[] = {
    {TaskKind::kImageGen, "ImageGen", "Gen", false, std::nullopt,
     MediaKind::kImage},
    {TaskKind::kLayoutGen, "LayoutGen", "Layout", true, std::nullopt,
     MediaKind::kLayout},
    {TaskKind::kImageEditGlobal, "ImageEditGlobal", "GlobalEdit", false,
     ArtifactSlot::kCurrentImage, MediaKind::kImage},
    {TaskKind::kImageEditRegion, "ImageEditRegion", "Edit", true,
     ArtifactSlot::kCurrentImage, MediaKind::kImage},
    {TaskKind::kImageSeg, "ImageSeg", "Seg", true, ArtifactSlot::kCurrentImage,
     MediaKind::kMask},
    {TaskKind::kVideoSeg, "VideoSeg", "VideoSeg", true,
     ArtifactSlot::kCurrentVideo, MediaKind::kMask},
    {TaskKind::kVideoGen, "VideoGen", "VideoGen", false, std::nullopt,
     MediaKind::kVideo},
    {TaskKind::kVideoEdit, "VideoEdit", "VideoEdit", false,
     ArtifactSlot::kCurrentVideo, MediaKind::kVideo},
    {TaskKind::kImageToVideo, "ImageToVideo", "ImageToVideo", false,
     ArtifactSlot::kCurrentImage, MediaKind::kVideo},
    {TaskKind::kAudioGen, "AudioGen", "AudioGen", false, std::nullopt,
     MediaKind::kAudio},
};

const KindInfo& Info(TaskKind kind) {
  for (const auto& info : kKindTable) {
    if (info.kind == kind) return info;
  }
  return kKindTable[0];
}

}  // namespace

std::string_view TaskKindName(TaskKind kind) { return Info(kind).name; }

std::optional<TaskKind> TaskKindFromName(std::string_view name) {
  for (const auto& info : kKindTable) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

std::string_view TaskKindTag(TaskKind kind) { return Info(kind).tag; }

std::optional<TaskKind> TaskKindFromTag(std::string_view tag) {
  for (const auto& info : kKindTable) {
    if (info.tag == tag) return info.kind;
  }
  return std::nullopt;
}

bool RequiresRegion(TaskKind kind) { return Info(kind).requires_region; }

std::optional<ArtifactSlot> InputSlot(TaskKind kind) { return Info(kind).input; }

MediaKind OutputMedia(TaskKind kind) { return Info(kind).output; }

std::optional<ArtifactSlot> SlotForMedia(MediaKind media) {
  switch (media) {
    case MediaKind::kImage: return ArtifactSlot::kCurrentImage;
    case MediaKind::kVideo: return ArtifactSlot::kCurrentVideo;
    case MediaKind::kAudio: return ArtifactSlot::kCurrentAudio;
    case MediaKind::kMask:
    case MediaKind::kLayout: return std::nullopt;
  }
  return std::nullopt;
}

MediaKind SlotMedia(ArtifactSlot slot) {
  switch (slot) {
    case ArtifactSlot::kCurrentImage: return MediaKind::kImage;
    case ArtifactSlot::kCurrentVideo: return MediaKind::kVideo;
    case ArtifactSlot::kCurrentAudio: return MediaKind::kAudio;
  }
  return MediaKind::kImage;
}

std::string_view MediaKindName(MediaKind media) {
  switch (media) {
    case MediaKind::kImage: return "image";
    case MediaKind::kVideo: return "video";
    case MediaKind::kAudio: return "audio";
    case MediaKind::kMask: return "mask";
    case MediaKind::kLayout: return "layout";
  }
  return "image";
}

std::optional<MediaKind> MediaKindFromName(std::string_view name) {
  for (MediaKind m : {MediaKind::kImage, MediaKind::kVideo, MediaKind::kAudio,
                      MediaKind::kMask, MediaKind::kLayout}) {
    if (MediaKindName(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view ArtifactSlotName(ArtifactSlot slot) {
  switch (slot) {
    case ArtifactSlot::kCurrentImage: return "current_image";
    case ArtifactSlot::kCurrentVideo: return "current_video";
    case ArtifactSlot::kCurrentAudio: return "current_audio";
  }
  return "current_image";
}

std::optional<ArtifactSlot> ArtifactSlotFromName(std::string_view name) {
  for (ArtifactSlot s : {ArtifactSlot::kCurrentImage, ArtifactSlot::kCurrentVideo,
                         ArtifactSlot::kCurrentAudio}) {
    if (ArtifactSlotName(s) == name) return s;
  }
  return std::nullopt;
}

}  // namespace taskroute
