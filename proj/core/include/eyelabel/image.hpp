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

#include <cstdint>
#include <string>
#include <vector>

#include "eyelabel/geometry.hpp"

namespace eyelabel {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

namespace colors {
inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kGreen{0, 255, 0};
inline constexpr Rgb kRed{255, 0, 0};
inline constexpr Rgb kBlue{40, 90, 255};
inline constexpr Rgb kViolet{148, 0, 211};
inline constexpr Rgb kOrange{255, 140, 0};
inline constexpr Rgb kYellow{255, 230, 0};
inline constexpr Rgb kCyan{0, 220, 255};
inline constexpr Rgb kGrey{128, 128, 128};
}  // namespace colors

/// Packed 8-bit RGB raster, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = colors::kBlack);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  /// Like set() but silently ignores coordinates outside the image.
  void plot(int x, int y, Rgb c) noexcept;

  const std::vector<std::uint8_t>& bytes() const noexcept { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c);
void draw_cross(RgbImage& img, Point2 center, int half_size, Rgb c);
void draw_rect(RgbImage& img, int x, int y, int width, int height, Rgb c);
/// Outline of an ellipse with semi-axes (major, minor) rotated by angle radians.
void draw_ellipse(RgbImage& img, Point2 center, double major, double minor, double angle, Rgb c);

/// Encodes as an 8-bit RGB PNG.
std::vector<std::uint8_t> encode_png(const RgbImage& img);
void write_png(const std::string& path, const RgbImage& img);

}  // namespace eyelabel
