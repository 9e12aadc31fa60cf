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
#include <span>
#include <vector>

#include "eyelabel/annotation_store.hpp"
#include "eyelabel/image.hpp"

namespace eyelabel {

/// Displacement between two consecutive annotated centers.
struct DeltaEntry {
  std::int64_t frame_index_prev = 0;
  std::int64_t frame_index_next = 0;
  double dx = 0.0;
  double dy = 0.0;
  std::int64_t gap_frames = 1;

  friend bool operator==(const DeltaEntry&, const DeltaEntry&) = default;
};

using DeltaSeries = std::vector<DeltaEntry>;

enum class DeltaMetric : std::uint8_t { kPerAxisMax, kEuclidean };

struct AnomalyConfig {
  /// Largest plausible pupil displacement within one 5 ms step.
  double threshold_px = 10.0;
  DeltaMetric metric = DeltaMetric::kPerAxisMax;
  /// Multiply the threshold by gap_frames for non-adjacent centers.
  bool scale_by_gap = true;
};

struct AnomalyReport {
  std::vector<DeltaEntry> anomalies;
  double threshold_px = 0.0;
  DeltaMetric metric = DeltaMetric::kPerAxisMax;
  bool scale_by_gap = true;
};

/// One entry per pair of consecutive records (in frame order) that both
/// carry a center; records without a center are skipped over.
DeltaSeries compute_deltas(std::span<const FrameAnnotation> records);

/// max(|dx|, |dy|) or hypot(dx, dy), depending on the metric.
double delta_magnitude(const DeltaEntry& e, DeltaMetric metric) noexcept;

/// True when the entry exceeds the (optionally gap-scaled) threshold.
bool is_anomalous(const DeltaEntry& e, const AnomalyConfig& config) noexcept;

/// The exceeding entries in series order. Throws std::invalid_argument for a
/// non-positive threshold.
AnomalyReport find_anomalies(std::span<const DeltaEntry> deltas, const AnomalyConfig& config);

/// Static delta plot: dx in blue, dy in red, saccade runs as a violet step
/// trace (rising at start, falling at end), blink runs in orange, anomalies
/// as green markers.
RgbImage render_anomaly_plot(std::span<const FrameAnnotation> records,
                             std::span<const DeltaEntry> deltas, const AnomalyReport& report,
                             int width = 1200, int height = 400);

}  // namespace eyelabel
