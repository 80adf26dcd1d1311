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

#ifndef TASKROUTE_REGION_H_
#define TASKROUTE_REGION_H_

#include <string>
#include <string_view>

namespace taskroute {

// Axis-aligned box in image-relative coordinates, each in [0, 1].
struct Region {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  friend bool operator==(const Region&, const Region&) = default;
};

// True iff 0 <= x1 <= x2 <= 1 and 0 <= y1 <= y2 <= 1.
bool IsValidRegion(const Region& r);

// Parses "[x1,y1,x2,y2]" (any decimal precision, optional blanks around
// numbers). Throws Error(kInvalidRegion) on bad arity, syntax or bounds.
Region ParseRegion(std::string_view text);

// "[0.320,0.410,0.780,0.950]". Throws Error(kInvalidRegion) if out of bounds.
std::string FormatRegion(const Region& r);

double RegionArea(const Region& r);

// Intersection area over union area; 0 when the union is empty.
double RegionIou(const Region& a, const Region& b);

}  // namespace taskroute

#endif  // TASKROUTE_REGION_H_
