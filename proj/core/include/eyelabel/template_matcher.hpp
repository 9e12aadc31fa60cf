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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "eyelabel/error.hpp"
#include "eyelabel/frame_accumulator.hpp"
#include "eyelabel/geometry.hpp"
#include "eyelabel/image.hpp"

namespace eyelabel {

/// Compass directions in image space. North points up the image (towards
/// smaller y).
enum class Direction : std::uint8_t { kE, kNE, kN, kNW, kW, kSW, kS, kSE };

inline constexpr std::array<Direction, 8> kAllDirections{
    Direction::kE, Direction::kNE, Direction::kN, Direction::kNW,
    Direction::kW, Direction::kSW, Direction::kS, Direction::kSE};

std::string_view to_string(Direction d) noexcept;
std::optional<Direction> parse_direction(std::string_view s) noexcept;
/// Unit vector in image coordinates, e.g. kN -> (0, -1).
Point2 unit_vector(Direction d) noexcept;

struct TemplateConfig {
  double pupil_radius_px = 10.0;
  /// Odd edge length of the square kernels.
  int kernel_size = 31;
  /// Radial spread (Gaussian sigma) of the ring weights.
  double ring_sigma_px = 1.5;
  int roi_width = 64;
  int roi_height = 64;
  /// Heatmap peaks below this are reported as NoSignal. Calibrated with the
  /// default bank on 346x260 frames: uniform salt-and-pepper noise peaks at
  /// 8e-4 (300 events), 1.8e-3 (1000) and 3.7e-3 (3000) over 100 seeds each,
  /// while a 10 px pupil moving 0.5 px in one window with one event per
  /// pixel crossing (60 events) already scores 0.021 and saccade-speed frames
  /// score 0.5 to 3.
  double min_score = 0.02;
};

/// Square kernel indexed by offsets in [-half, half] on both axes.
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(int size);

  int size() const noexcept { return size_; }
  int half() const noexcept { return size_ / 2; }
  double at(int dx, int dy) const { return weights_[index(dx, dy)]; }
  double& at(int dx, int dy) { return weights_[index(dx, dy)]; }
  double sum() const noexcept;
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::size_t index(int dx, int dy) const;

  int size_ = 0;
  std::vector<double> weights_;
};

/// Eight zero-mean directional templates. The kernel for direction d is
/// ring(rho) * cos(angle between offset and d): positive on the arc of the
/// pupil circle facing d (the leading edge of a pupil moving towards d) and
/// negative on the opposite, trailing arc. Positive weights sum to one.
struct TemplateBank {
  std::array<Kernel, 8> templates;
  int kernel_size = 0;
  double pupil_radius_px = 0.0;

  const Kernel& operator[](Direction d) const noexcept {
    return templates[static_cast<std::size_t>(d)];
  }
};

enum class MatchErrorKind { kNoSignal, kInvalidConfig };
using MatchError = TypedError<MatchErrorKind>;

/// Throws kInvalidConfig when kernel_size < 2 * pupil_radius_px or when the
/// kernel size is not a positive odd number.
TemplateBank build_default_templates(const TemplateConfig& config = {});

/// Axis-aligned box [x0, x0 + width) x [y0, y0 + height), already clipped to
/// the frame.
struct RoiBox {
  PixelPos center;
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  bool contains(int x, int y) const noexcept {
    return x >= x0 && y >= y0 && x < x0 + width && y < y0 + height;
  }
  friend bool operator==(const RoiBox&, const RoiBox&) = default;
};

/// Box of the requested size centred on `center`, clipped to the sensor.
RoiBox make_roi(PixelPos center, int width, int height, SensorSize sensor);

struct MatchResult {
  PixelPos tentative_center;
  Direction direction = Direction::kE;
  double score = 0.0;
  RoiBox roi;
};

/// Heatmap for one direction (row-major, frame-sized):
///   max(0, pos (x) K_d) * max(0, neg (x) -K_d)
/// where (x) is cross-correlation with zero padding. Positive events are
/// rewarded on the leading arc and negative events on the trailing arc.
std::vector<double> direction_heatmap(const PolarityFrame& frame, const TemplateBank& bank,
                                      Direction d);

/// Global maximum over the eight heatmaps. Ties resolve to the earlier
/// direction in kAllDirections, then to the first pixel in row-major order.
/// Throws kNoSignal for empty frames or when the peak is below
/// config.min_score.
MatchResult match_pupil(const PolarityFrame& frame, const TemplateBank& bank,
                        const TemplateConfig& config = {});

/// Coordinates of every pixel inside the ROI that saw at least one event,
/// each listed once, row-major.
std::vector<Point2> roi_points(const PolarityFrame& frame, const RoiBox& roi);

/// Grey-scale visualisation of a heatmap scaled to its own maximum.
RgbImage render_heatmap(const std::vector<double>& heatmap, SensorSize size);

}  // namespace eyelabel
