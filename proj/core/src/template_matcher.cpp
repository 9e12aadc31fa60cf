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

#include "eyelabel/template_matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace eyelabel {
namespace {

constexpr std::array<std::string_view, 8> kDirectionNames{"E", "NE", "N", "NW", "W", "SW", "S", "SE"};

struct Tap {
  int dx;
  int dy;
  double w;
};

std::vector<Tap> nonzero_taps(const Kernel& k) {
  std::vector<Tap> taps;
  for (int dy = -k.half(); dy <= k.half(); ++dy) {
    for (int dx = -k.half(); dx <= k.half(); ++dx) {
      const double w = k.at(dx, dy);
      if (w != 0.0) taps.push_back({dx, dy, w});
    }
  }
  return taps;
}

// out(c) = sum_o k(o) * grid(c + o), evaluated by scattering every nonzero
// grid pixel. Each output pixel accumulates contributions in row-major order
// of the source pixels, so shifting the input shifts the output bit-exactly.
std::vector<double> correlate(const std::vector<std::uint32_t>& grid, SensorSize size,
                              const std::vector<Tap>& taps) {
  std::vector<double> out(grid.size(), 0.0);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const auto v = grid[static_cast<std::size_t>(y) * static_cast<std::size_t>(size.width) +
                          static_cast<std::size_t>(x)];
      if (v == 0) continue;
      const double value = static_cast<double>(v);
      for (const auto& t : taps) {
        const int cx = x - t.dx;
        const int cy = y - t.dy;
        if (!size.contains(cx, cy)) continue;
        out[static_cast<std::size_t>(cy) * static_cast<std::size_t>(size.width) +
            static_cast<std::size_t>(cx)] += t.w * value;
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Direction d) noexcept {
  return kDirectionNames[static_cast<std::size_t>(d)];
}

std::optional<Direction> parse_direction(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kDirectionNames.size(); ++i) {
    if (kDirectionNames[i] == s) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

Point2 unit_vector(Direction d) noexcept {
  constexpr double h = std::numbers::sqrt2 / 2.0;
  switch (d) {
    case Direction::kE: return {1.0, 0.0};
    case Direction::kNE: return {h, -h};
    case Direction::kN: return {0.0, -1.0};
    case Direction::kNW: return {-h, -h};
    case Direction::kW: return {-1.0, 0.0};
    case Direction::kSW: return {-h, h};
    case Direction::kS: return {0.0, 1.0};
    case Direction::kSE: return {h, h};
  }
  return {1.0, 0.0};
}

Kernel::Kernel(int size) : size_(size) {
  if (size <= 0 || size % 2 == 0) {
    throw MatchError(MatchErrorKind::kInvalidConfig, "kernel size must be a positive odd number");
  }
  weights_.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
}

std::size_t Kernel::index(int dx, int dy) const {
  const int h = half();
  if (dx < -h || dx > h || dy < -h || dy > h) throw std::out_of_range("kernel offset out of range");
  return static_cast<std::size_t>(dy + h) * static_cast<std::size_t>(size_) +
         static_cast<std::size_t>(dx + h);
}

double Kernel::sum() const noexcept {
  double s = 0.0;
  for (const double w : weights_) s += w;
  return s;
}

TemplateBank build_default_templates(const TemplateConfig& config) {
  if (!(config.pupil_radius_px > 0.0) || !(config.ring_sigma_px > 0.0)) {
    throw MatchError(MatchErrorKind::kInvalidConfig, "pupil radius and ring sigma must be positive");
  }
  if (config.kernel_size < 2.0 * config.pupil_radius_px) {
    throw MatchError(MatchErrorKind::kInvalidConfig,
                     "kernel_size " + std::to_string(config.kernel_size) +
                         " cannot hold a pupil of radius " +
                         std::to_string(config.pupil_radius_px));
  }
  TemplateBank bank;
  bank.kernel_size = config.kernel_size;
  bank.pupil_radius_px = config.pupil_radius_px;
  const double r = config.pupil_radius_px;
  const double sigma = config.ring_sigma_px;

  for (const Direction d : kAllDirections) {
    Kernel k(config.kernel_size);
    const Point2 u = unit_vector(d);
    std::vector<double> positive;
    for (int dy = -k.half(); dy <= k.half(); ++dy) {
      for (int dx = -k.half(); dx <= k.half(); ++dx) {
        const double rho = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
        if (rho == 0.0 || std::abs(rho - r) > 3.0 * sigma) continue;
        const double ring = std::exp(-(rho - r) * (rho - r) / (2.0 * sigma * sigma));
        const double w = ring * (u.x * dx + u.y * dy) / rho;
        k.at(dx, dy) = w;
        if (w > 0.0) positive.push_back(w);
      }
    }
    // Summing in sorted order makes mirrored and rotated kernels bit-identical.
    std::sort(positive.begin(), positive.end());
    const double positive_mass = std::accumulate(positive.begin(), positive.end(), 0.0);
    for (int dy = -k.half(); dy <= k.half(); ++dy) {
      for (int dx = -k.half(); dx <= k.half(); ++dx) k.at(dx, dy) /= positive_mass;
    }
    bank.templates[static_cast<std::size_t>(d)] = std::move(k);
  }
  return bank;
}

RoiBox make_roi(PixelPos center, int width, int height, SensorSize sensor) {
  RoiBox roi;
  roi.center = center;
  const int x0 = center.x - width / 2;
  const int y0 = center.y - height / 2;
  const int x1 = std::min(sensor.width, x0 + width);
  const int y1 = std::min(sensor.height, y0 + height);
  roi.x0 = std::clamp(x0, 0, sensor.width);
  roi.y0 = std::clamp(y0, 0, sensor.height);
  roi.width = std::max(0, x1 - roi.x0);
  roi.height = std::max(0, y1 - roi.y0);
  return roi;
}

std::vector<double> direction_heatmap(const PolarityFrame& frame, const TemplateBank& bank,
                                      Direction d) {
  const auto taps = nonzero_taps(bank[d]);
  const auto lead = correlate(frame.pos_counts, frame.size, taps);
  const auto trail = correlate(frame.neg_counts, frame.size, taps);
  std::vector<double> heat(lead.size());
  for (std::size_t i = 0; i < heat.size(); ++i) {
    heat[i] = std::max(0.0, lead[i]) * std::max(0.0, -trail[i]);
  }
  return heat;
}

MatchResult match_pupil(const PolarityFrame& frame, const TemplateBank& bank,
                        const TemplateConfig& config) {
  if (frame.total_events == 0) {
    throw MatchError(MatchErrorKind::kNoSignal, "frame " + std::to_string(frame.index) +
                                                    " has no events");
  }
  double best = 0.0;
  std::size_t best_pixel = 0;
  Direction best_dir = Direction::kE;
  bool found = false;
  for (const Direction d : kAllDirections) {
    const auto heat = direction_heatmap(frame, bank, d);
    for (std::size_t i = 0; i < heat.size(); ++i) {
      if (heat[i] > best) {
        best = heat[i];
        best_pixel = i;
        best_dir = d;
        found = true;
      }
    }
  }
  if (!found || best < config.min_score) {
    throw MatchError(MatchErrorKind::kNoSignal,
                     "frame " + std::to_string(frame.index) + ": template peak " +
                         std::to_string(best) + " below min_score " +
                         std::to_string(config.min_score));
  }
  MatchResult result;
  result.direction = best_dir;
  result.score = best;
  result.tentative_center = {static_cast<int>(best_pixel % static_cast<std::size_t>(frame.width())),
                             static_cast<int>(best_pixel / static_cast<std::size_t>(frame.width()))};
  result.roi = make_roi(result.tentative_center, config.roi_width, config.roi_height, frame.size);
  return result;
}

std::vector<Point2> roi_points(const PolarityFrame& frame, const RoiBox& roi) {
  std::vector<Point2> pts;
  for (int y = roi.y0; y < roi.y0 + roi.height; ++y) {
    for (int x = roi.x0; x < roi.x0 + roi.width; ++x) {
      if (frame.pos(x, y) != 0 || frame.neg(x, y) != 0) {
        pts.push_back({static_cast<double>(x), static_cast<double>(y)});
      }
    }
  }
  return pts;
}

RgbImage render_heatmap(const std::vector<double>& heatmap, SensorSize size) {
  RgbImage img(size.width, size.height, colors::kBlack);
  double peak = 0.0;
  for (const double v : heatmap) peak = std::max(peak, v);
  if (peak <= 0.0) return img;
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const double v = heatmap[static_cast<std::size_t>(y) * static_cast<std::size_t>(size.width) +
                               static_cast<std::size_t>(x)];
      const auto g = static_cast<std::uint8_t>(std::lround(255.0 * std::max(0.0, v) / peak));
      img.set(x, y, {g, g, g});
    }
  }
  return img;
}

}  // namespace eyelabel
