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
#include <map>
#include <string>
#include <vector>

#include "eyelabel/annotation_store.hpp"
#include "eyelabel/anomaly_detector.hpp"
#include "eyelabel/event_ingest.hpp"
#include "eyelabel/movement_detector.hpp"
#include "eyelabel/ransac_ellipse.hpp"
#include "eyelabel/template_matcher.hpp"

namespace eyelabel {

struct PipelineConfig {
  IngestConfig ingest;
  std::int64_t window_us = kDefaultWindowUs;
  DetectorConfig detector;
  TemplateConfig templates;
  RansacConfig ransac = default_ransac();
  std::uint64_t min_event_threshold = 30;
  AnomalyConfig anomaly;
  /// Worker threads for the per-frame stages; results do not depend on it.
  int jobs = 1;

  /// RANSAC defaults with semi-axis bounds sized for the default 10 px pupil.
  static RansacConfig default_ransac() {
    RansacConfig r;
    r.min_semi_axis_px = 2.5;
    r.max_semi_axis_px = 40.0;
    return r;
  }

  /// Throws std::invalid_argument naming the first non-positive parameter.
  void validate() const;

  /// Overrides fields from key/value pairs, e.g. as read by
  /// load_key_value_file(). Unknown keys throw std::invalid_argument.
  void apply(const std::map<std::string, std::string>& kv);
};

/// Reads "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> load_key_value_file(const std::string& path);

/// Seed for frame `frame_index`, independent of processing order.
std::uint64_t frame_seed(std::uint64_t base_seed, std::int64_t frame_index) noexcept;

struct PupilEstimate {
  MatchResult match;
  EllipseFit fit;
};

/// Template match followed by RANSAC on the ROI pixels. Throws MatchError or
/// EllipseError from the failing stage.
PupilEstimate locate_pupil(const PolarityFrame& frame, const TemplateBank& bank,
                           const PipelineConfig& config);

struct RunReport {
  std::uint64_t frames = 0;
  std::uint64_t events = 0;
  std::uint64_t active_frames = 0;
  std::uint64_t saccade_count = 0;
  std::uint64_t centers = 0;
  std::uint64_t no_signal = 0;
  std::uint64_t fit_failures = 0;
  /// Frame index and reason for every active frame left without a center.
  std::vector<std::pair<std::int64_t, std::string>> failures;
};

struct AnnotationRun {
  std::vector<FrameAnnotation> annotations;
  RunReport report;
};

/// accumulate -> detect_saccades -> (active frames) match_pupil -> ransac_fit.
/// Emits one AUTO record per frame; only active frames with a successful fit
/// receive a center (rounded to the stored two-decimal precision).
AnnotationRun annotate(const EventStream& stream, const PipelineConfig& config);

}  // namespace eyelabel
