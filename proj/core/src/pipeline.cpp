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

#include "eyelabel/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace eyelabel {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    try {
      out = static_cast<T>(std::stod(value, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
    }
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  auto positive = [](bool ok, const char* name) {
    if (!ok) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(window_us > 0, "window_us");
  positive(detector.event_threshold > 0, "saccade threshold");
  positive(templates.pupil_radius_px > 0, "pupil radius");
  positive(templates.kernel_size > 0, "kernel size");
  positive(templates.ring_sigma_px > 0, "ring sigma");
  positive(templates.roi_width > 0 && templates.roi_height > 0, "roi size");
  positive(templates.min_score > 0, "min_score");
  positive(ransac.iterations > 0, "ransac iterations");
  positive(ransac.inlier_tol_px > 0, "inlier tolerance");
  positive(ransac.min_inlier_ratio > 0, "min inlier ratio");
  positive(min_event_threshold > 0, "min_event_threshold");
  positive(anomaly.threshold_px > 0, "anomaly threshold");
  positive(jobs > 0, "jobs");
  positive(ingest.sensor.width > 0 && ingest.sensor.height > 0, "sensor resolution");
}

void PipelineConfig::apply(const std::map<std::string, std::string>& kv) {
  std::map<std::string, std::string> ingest_keys;
  for (const auto& [key, value] : kv) {
    if (key == "window_us") window_us = parse_number<std::int64_t>(key, value);
    else if (key == "saccade_threshold") detector.event_threshold = parse_number<std::uint64_t>(key, value);
    else if (key == "pupil_radius") templates.pupil_radius_px = parse_number<double>(key, value);
    else if (key == "kernel_size") templates.kernel_size = parse_number<int>(key, value);
    else if (key == "ring_sigma") templates.ring_sigma_px = parse_number<double>(key, value);
    else if (key == "roi_width") templates.roi_width = parse_number<int>(key, value);
    else if (key == "roi_height") templates.roi_height = parse_number<int>(key, value);
    else if (key == "min_score") templates.min_score = parse_number<double>(key, value);
    else if (key == "ransac_iters") ransac.iterations = parse_number<int>(key, value);
    else if (key == "inlier_tol") ransac.inlier_tol_px = parse_number<double>(key, value);
    else if (key == "min_inlier_ratio") ransac.min_inlier_ratio = parse_number<double>(key, value);
    else if (key == "ransac_seed") ransac.rng_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "ransac_min_axis") ransac.min_semi_axis_px = parse_number<double>(key, value);
    else if (key == "ransac_max_axis") ransac.max_semi_axis_px = parse_number<double>(key, value);
    else if (key == "min_event_threshold") min_event_threshold = parse_number<std::uint64_t>(key, value);
    else if (key == "anomaly_threshold") anomaly.threshold_px = parse_number<double>(key, value);
    else if (key == "anomaly_metric") {
      if (value != "max" && value != "euclidean") {
        throw std::invalid_argument("anomaly_metric must be max or euclidean");
      }
      anomaly.metric = value == "euclidean" ? DeltaMetric::kEuclidean : DeltaMetric::kPerAxisMax;
    } else if (key == "anomaly_scale_by_gap") {
      anomaly.scale_by_gap = value == "true" || value == "1";
    } else if (key == "jobs") {
      jobs = parse_number<int>(key, value);
    } else if (key == "columns" || key == "delimiter" || key == "time_unit" || key == "width" ||
               key == "height" || key == "out_of_bounds" || key == "ordering") {
      ingest_keys.emplace(key, value);
    } else {
      throw std::invalid_argument("unknown configuration key '" + key + "'");
    }
  }
  ingest.apply(ingest_keys);
}

std::map<std::string, std::string> load_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::uint64_t frame_seed(std::uint64_t base_seed, std::int64_t frame_index) noexcept {
  // splitmix64 finaliser
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(frame_index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PupilEstimate locate_pupil(const PolarityFrame& frame, const TemplateBank& bank,
                           const PipelineConfig& config) {
  PupilEstimate est;
  est.match = match_pupil(frame, bank, config.templates);
  const auto points = roi_points(frame, est.match.roi);
  RansacConfig rc = config.ransac;
  rc.rng_seed = frame_seed(config.ransac.rng_seed, frame.index);
  est.fit = ransac_fit(points, rc);
  return est;
}

AnnotationRun annotate(const EventStream& stream, const PipelineConfig& config) {
  config.validate();
  const TemplateBank bank = build_default_templates(config.templates);
  const auto counts = frame_event_counts(stream, config.window_us);
  const auto states = detect_saccades(std::span<const std::uint64_t>(counts), config.detector);

  AnnotationRun run;
  run.report.frames = counts.size();
  run.report.events = stream.count();
  run.report.saccade_count = count_saccades(states);
  run.annotations.resize(counts.size());
  std::vector<std::int64_t> active;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    auto& rec = run.annotations[i];
    rec.frame_index = static_cast<std::int64_t>(i);
    rec.t_start_us = rec.frame_index * config.window_us;
    rec.event_count = counts[i];
    rec.saccade_state = states[i];
    if (is_active(states[i])) active.push_back(rec.frame_index);
  }
  run.report.active_frames = active.size();

  // Each slot is written by exactly one worker; order of completion is
  // irrelevant to the output.
  std::vector<std::string> failure(active.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t k = begin; k < active.size(); k += step) {
      const std::int64_t idx = active[k];
      const auto frame = frame_at(stream, idx, config.window_us);
      auto& rec = run.annotations[static_cast<std::size_t>(idx)];
      try {
        const auto est = locate_pupil(frame, bank, config);
        const Point2 c{quantize_coordinate(est.fit.center.x), quantize_coordinate(est.fit.center.y)};
        if (stream.sensor.contains(c)) {
          rec.center = c;
        } else {
          failure[k] = "fit: center outside sensor";
        }
      } catch (const MatchError& e) {
        failure[k] = std::string("match: ") + e.what();
      } catch (const EllipseError& e) {
        failure[k] = std::string("fit: ") + e.what();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, config.jobs));
  if (workers == 1 || active.size() < 2) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  for (std::size_t k = 0; k < active.size(); ++k) {
    if (failure[k].empty()) {
      ++run.report.centers;
      continue;
    }
    if (failure[k].rfind("match:", 0) == 0) ++run.report.no_signal;
    else ++run.report.fit_failures;
    run.report.failures.emplace_back(active[k], failure[k]);
  }
  return run;
}

}  // namespace eyelabel
