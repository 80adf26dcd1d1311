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

#ifndef TASKROUTE_TESTS_TEST_UTIL_H_
#define TASKROUTE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "taskroute/loramoe.h"
#include "taskroute/region.h"
#include "taskroute/task_kind.h"
#include "taskroute/token_protocol.h"

namespace taskroute::testing {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("taskroute-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

using Rng = std::mt19937_64;

inline std::size_t Uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double UniformReal(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Corners on the 1/1000 grid, so the canonical 3-decimal text reads back to
// the same doubles.
inline Region RandomGridRegion(Rng& rng) {
  std::size_t a = Uniform(rng, 0, 1000), b = Uniform(rng, 0, 1000);
  std::size_t c = Uniform(rng, 0, 1000), d = Uniform(rng, 0, 1000);
  return Region{std::min(a, b) / 1000.0, std::min(c, d) / 1000.0,
                std::max(a, b) / 1000.0, std::max(c, d) / 1000.0};
}

inline Region RandomRegion(Rng& rng) {
  double a = UniformReal(rng, 0, 1), b = UniformReal(rng, 0, 1);
  double c = UniformReal(rng, 0, 1), d = UniformReal(rng, 0, 1);
  return Region{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
}

// Nonempty text that never forms a tag candidate but does contain stray
// '<', '>' and brackets.
inline std::string RandomPlainText(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "the", "red", "car", "dog", " ", " ", "sure", ".", ",", "<3", "a < b",
      "x>y", "[1,2]", "ok!", "\n", "café", "42", "_", "box", "Edit", ">"};
  std::string out;
  std::size_t n = Uniform(rng, 1, 6);
  for (std::size_t i = 0; i < n; ++i) out += pieces[Uniform(rng, 0, pieces.size() - 1)];
  return out;
}

struct MessageOptions {
  std::size_t max_segments = 6;
  // Region-requiring tasks always carry at least one inner region, so the
  // message validates cleanly.
  bool valid_for_routing = true;
};

inline std::vector<Segment> RandomSegments(Rng& rng, const MessageOptions& opts = {}) {
  std::vector<Segment> segs;
  std::size_t n = Uniform(rng, 0, opts.max_segments);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pick = Uniform(rng, 0, 2);
    bool last_was_text = !segs.empty() && segs.back().text();
    if (pick == 0 && !last_was_text) {
      segs.emplace_back(TextSegment{RandomPlainText(rng)});
    } else if (pick == 1 || pick == 0) {
      TaskKind kind = kAllTaskKinds[Uniform(rng, 0, kAllTaskKinds.size() - 1)];
      TaskSegment task{kind, Uniform(rng, 0, 4) == 0 ? "" : RandomPlainText(rng), {}};
      std::size_t regions = Uniform(rng, 0, 2);
      if (opts.valid_for_routing && RequiresRegion(kind) && regions == 0) regions = 1;
      for (std::size_t r = 0; r < regions; ++r) task.regions.push_back(RandomGridRegion(rng));
      segs.emplace_back(std::move(task));
    } else {
      segs.emplace_back(GroundingSegment{RandomGridRegion(rng)});
    }
  }
  return segs;
}

// Splits `text` at `cuts` random byte positions (possibly empty chunks).
inline std::vector<std::string> RandomChunks(Rng& rng, const std::string& text,
                                             std::size_t cuts) {
  std::vector<std::size_t> at{0, text.size()};
  for (std::size_t i = 0; i < cuts; ++i) at.push_back(Uniform(rng, 0, text.size()));
  std::sort(at.begin(), at.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < at.size(); ++i) {
    out.push_back(text.substr(at[i], at[i + 1] - at[i]));
  }
  return out;
}

// Mostly-tag soup: valid messages, fragments of tokens and mutations of both.
inline std::string RandomTokenSoup(Rng& rng) {
  static const std::vector<std::string> fragments = {
      "<Edit>", "</Edit>", "<Seg>", "</Seg>", "<Gen>", "</Gen>", "<box>", "</box>",
      "[0.1,0.2,0.3,0.4]", "[0.5,0.5,0.2,0.9]", "[1.2,0,0,0]", "[", "]", ",", "<",
      ">", "/", "<Foo>", "</box", "<VideoGen>", "</VideoGen>", "text", " ", "0.5",
      "<box>[0.000,0.000,1.000,1.000]</box>", "<Edit>x</Edit>", "<GlobalEdit>",
      "</GlobalEdit>", "<b", "ox>", "<Layout>", "</Layout>", "-1", "nan", "1e3"};
  if (Uniform(rng, 0, 3) == 0) {
    std::string s = Serialize(RandomSegments(rng));
    std::size_t edits = Uniform(rng, 0, 3);
    for (std::size_t i = 0; i < edits && !s.empty(); ++i) {
      std::size_t at = Uniform(rng, 0, s.size() - 1);
      switch (Uniform(rng, 0, 2)) {
        case 0: s.erase(at, 1); break;
        case 1: s.insert(at, fragments[Uniform(rng, 0, fragments.size() - 1)]); break;
        default: s[at] = static_cast<char>(Uniform(rng, 32, 126)); break;
      }
    }
    return s;
  }
  std::string s;
  std::size_t n = Uniform(rng, 0, 12);
  for (std::size_t i = 0; i < n; ++i) s += fragments[Uniform(rng, 0, fragments.size() - 1)];
  return s;
}

inline std::string RandomBytes(Rng& rng, std::size_t max_len) {
  std::string s(Uniform(rng, 0, max_len), '\0');
  for (auto& c : s) c = static_cast<char>(Uniform(rng, 0, 255));
  return s;
}

inline DenseMatrix RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols,
                                double scale = 1.0) {
  std::vector<double> v(rows * cols);
  for (auto& e : v) e = UniformReal(rng, -scale, scale);
  return DenseMatrix(rows, cols, std::move(v));
}

inline Vector RandomVector(Rng& rng, std::size_t n, double scale = 1.0) {
  Vector v(n);
  for (auto& e : v) e = UniformReal(rng, -scale, scale);
  return v;
}

// d_in, d_out <= 8, N <= 4, r <= 4, alpha = 2r.
inline LoRAMoELayer RandomLayer(Rng& rng, std::size_t max_dim = 8, std::size_t max_n = 4,
                                std::size_t max_r = 4) {
  std::size_t d_in = Uniform(rng, 1, max_dim), d_out = Uniform(rng, 1, max_dim);
  std::size_t n = Uniform(rng, 1, max_n), r = Uniform(rng, 1, max_r);
  LoRAMoELayer layer;
  layer.base = RandomMatrix(rng, d_out, d_in);
  layer.gate = RandomMatrix(rng, n, d_in);
  layer.rank = r;
  layer.alpha = 2.0 * static_cast<double>(r);
  for (std::size_t i = 0; i < n; ++i) {
    layer.experts.push_back({RandomMatrix(rng, r, d_in), RandomMatrix(rng, d_out, r)});
  }
  return layer;
}

inline double MaxRelativeError(const Vector& a, const Vector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace taskroute::testing

#endif  // TASKROUTE_TESTS_TEST_UTIL_H_
