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

#include "taskroute/region.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "taskroute/error.h"

namespace taskroute {
namespace {

bool IsBlank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsBlank(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsBlank(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

bool IsValidRegion(const Region& r) {
  // Written so that NaN fails every comparison.
  return r.x1 >= 0.0 && r.x1 <= r.x2 && r.x2 <= 1.0 && r.y1 >= 0.0 &&
         r.y1 <= r.y2 && r.y2 <= 1.0;
}

Region ParseRegion(std::string_view text) {
  std::string_view body = Trim(text);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    throw Error(ErrorCode::kInvalidRegion,
                "expected [x1,y1,x2,y2], got '" + std::string(text) + "'");
  }
  body = body.substr(1, body.size() - 2);

  std::array<double, 4> values{};
  std::size_t count = 0;
  while (true) {
    std::size_t comma = body.find(',');
    std::string_view field = Trim(body.substr(0, comma));
    if (count == values.size()) {
      throw Error(ErrorCode::kInvalidRegion, "more than 4 coordinates");
    }
    if (field.empty() || field.front() == '+' || field.front() == '-') {
      throw Error(ErrorCode::kInvalidRegion, "empty or signed coordinate");
    }
    double v = 0.0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                     v, std::chars_format::fixed);
    if (ec != std::errc() || end != field.data() + field.size()) {
      throw Error(ErrorCode::kInvalidRegion,
                  "not a decimal number: '" + std::string(field) + "'");
    }
    values[count++] = v;
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  if (count != values.size()) {
    throw Error(ErrorCode::kInvalidRegion,
                "expected 4 coordinates, got " + std::to_string(count));
  }

  Region r{values[0], values[1], values[2], values[3]};
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidRegion, "coordinate out of [0,1]");
    }
  }
  if (r.x2 < r.x1) throw Error(ErrorCode::kInvalidRegion, "x2 < x1");
  if (r.y2 < r.y1) throw Error(ErrorCode::kInvalidRegion, "y2 < y1");
  return r;
}

std::string FormatRegion(const Region& r) {
  if (!IsValidRegion(r)) {
    throw Error(ErrorCode::kInvalidRegion, "region violates bounds");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "[%.3f,%.3f,%.3f,%.3f]", r.x1, r.y1, r.x2,
                r.y2);
  return buf;
}

double RegionArea(const Region& r) {
  return std::max(0.0, r.x2 - r.x1) * std::max(0.0, r.y2 - r.y1);
}

double RegionIou(const Region& a, const Region& b) {
  double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  double uni = RegionArea(a) + RegionArea(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

}  // namespace taskroute
