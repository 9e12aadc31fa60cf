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

#include "eyelabel/anomaly_detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eyelabel {

DeltaSeries compute_deltas(std::span<const FrameAnnotation> records) {
  DeltaSeries out;
  const FrameAnnotation* prev = nullptr;
  for (const auto& r : records) {
    if (!r.center) continue;
    if (prev != nullptr) {
      if (r.frame_index <= prev->frame_index) {
        throw std::invalid_argument("annotations must be sorted by frame_index");
      }
      out.push_back({prev->frame_index, r.frame_index, r.center->x - prev->center->x,
                     r.center->y - prev->center->y, r.frame_index - prev->frame_index});
    }
    prev = &r;
  }
  return out;
}

double delta_magnitude(const DeltaEntry& e, DeltaMetric metric) noexcept {
  return metric == DeltaMetric::kEuclidean ? std::hypot(e.dx, e.dy)
                                           : std::max(std::abs(e.dx), std::abs(e.dy));
}

bool is_anomalous(const DeltaEntry& e, const AnomalyConfig& config) noexcept {
  const double limit =
      config.scale_by_gap ? config.threshold_px * static_cast<double>(e.gap_frames) : config.threshold_px;
  return delta_magnitude(e, config.metric) > limit;
}

AnomalyReport find_anomalies(std::span<const DeltaEntry> deltas, const AnomalyConfig& config) {
  if (!(config.threshold_px > 0.0)) throw std::invalid_argument("threshold_px must be positive");
  AnomalyReport report;
  report.threshold_px = config.threshold_px;
  report.metric = config.metric;
  report.scale_by_gap = config.scale_by_gap;
  for (const auto& e : deltas) {
    if (is_anomalous(e, config)) report.anomalies.push_back(e);
  }
  return report;
}

RgbImage render_anomaly_plot(std::span<const FrameAnnotation> records,
                             std::span<const DeltaEntry> deltas, const AnomalyReport& report,
                             int width, int height) {
  RgbImage img(width, height, colors::kWhite);
  constexpr int kMargin = 20;
  constexpr int kBand = 24;  // top strip for the state traces
  const int plot_top = kMargin + 2 * kBand;
  const int plot_bottom = height - kMargin;
  const int plot_left = kMargin;
  const int plot_right = width - kMargin;
  if (plot_bottom <= plot_top || plot_right <= plot_left) return img;

  std::int64_t f_min = 0;
  std::int64_t f_max = 1;
  if (!records.empty()) {
    f_min = records.front().frame_index;
    f_max = std::max(f_min + 1, records.back().frame_index);
  }
  double amp = report.threshold_px * 1.5;
  for (const auto& e : deltas) amp = std::max({amp, std::abs(e.dx), std::abs(e.dy)});

  auto px = [&](std::int64_t f) {
    return plot_left + static_cast<int>(std::lround(static_cast<double>(f - f_min) /
                                                    static_cast<double>(f_max - f_min) *
                                                    (plot_right - plot_left)));
  };
  const int mid = (plot_top + plot_bottom) / 2;
  const double half = 0.5 * (plot_bottom - plot_top);
  auto py = [&](double v) { return mid - static_cast<int>(std::lround(v / amp * half)); };

  draw_line(img, plot_left, mid, plot_right, mid, colors::kGrey);
  for (const double t : {report.threshold_px, -report.threshold_px}) {
    for (int x = plot_left; x <= plot_right; x += 6) img.plot(x, py(t), colors::kGrey);
  }

  // State traces: low when idle, high while a run is open.
  auto state_trace = [&](int base, Rgb color, auto active) {
    int last_x = px(f_min);
    int last_y = base;
    for (const auto& r : records) {
      const int x = px(r.frame_index);
      const int y = active(r) ? base - kBand + 6 : base;
      draw_line(img, last_x, last_y, x, last_y, color);
      if (y != last_y) draw_line(img, x, last_y, x, y, color);
      last_x = x;
      last_y = y;
    }
  };
  state_trace(kMargin + kBand, colors::kViolet,
              [](const FrameAnnotation& r) { return r.saccade_state != SaccadeState::kNone; });
  state_trace(kMargin + 2 * kBand, colors::kOrange,
              [](const FrameAnnotation& r) { return r.blink_state != BlinkState::kNone; });

  for (std::size_t i = 1; i < deltas.size(); ++i) {
    const auto& a = deltas[i - 1];
    const auto& b = deltas[i];
    draw_line(img, px(a.frame_index_next), py(a.dx), px(b.frame_index_next), py(b.dx), colors::kBlue);
    draw_line(img, px(a.frame_index_next), py(a.dy), px(b.frame_index_next), py(b.dy), colors::kRed);
  }
  for (const auto& e : report.anomalies) {
    const int x = px(e.frame_index_next);
    const int y = py(std::abs(e.dx) >= std::abs(e.dy) ? e.dx : e.dy);
    for (int dy = -4; dy <= 4; ++dy) {
      for (int dx = -4; dx <= 4; ++dx) {
        if (dx * dx + dy * dy <= 16) img.plot(x + dx, y + dy, colors::kGreen);
      }
    }
  }
  return img;
}

}  // namespace eyelabel
