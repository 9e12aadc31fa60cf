// Copyright 2026 The eyelabel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace eyelabel {

/// Sub-pixel image position. x grows to the right, y grows downwards.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct PixelPos {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelPos&, const PixelPos&) = default;
};

struct SensorSize {
  int width = 346;
  int height = 260;

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  bool contains(const Point2& p) const noexcept {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < width && p.y < height;
  }
  int pixel_count() const noexcept { return width * height; }

  friend bool operator==(const SensorSize&, const SensorSize&) = default;
};

}  // namespace eyelabel
