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
#include <vector>

#include "eyelabel/event_ingest.hpp"
#include "eyelabel/frame_accumulator.hpp"
#include "eyelabel/geometry.hpp"
#include "eyelabel/template_matcher.hpp"

// Synthetic event generator used as ground truth by the tests, benchmarks
// and the `simulate` CLI command. A dark circular pupil moving over the
// sensor emits positive events on pixels it is entering (leading edge) and
// negative events on pixels it is leaving (trailing edge); background noise
// is uniform in space and time with random polarity.
namespace eyelabel::sim {

struct PupilFrameSpec {
  SensorSize sensor{};
  std::int64_t index = 0;
  std::int64_t window_us = kDefaultWindowUs;
  /// Pupil center at the middle of the window.
  Point2 center{173.0, 130.0};
  /// Unit-free direction of travel; normalised internally.
  Point2 heading{1.0, 0.0};
  /// Distance travelled during the window.
  double displacement_px = 4.0;
  double radius_px = 10.0;
  int events_per_crossing = 2;
  int substeps = 10;
  std::size_t noise_events = 0;
  std::uint64_t seed = 0;
};

/// Events of a single window with a pupil moving in a straight line.
EventStream simulate_moving_pupil(const PupilFrameSpec& spec);
PolarityFrame simulate_moving_pupil_frame(const PupilFrameSpec& spec);

/// `count` events at uniformly random pixels, times and polarities inside
/// window `index`.
EventStream uniform_noise(SensorSize sensor, std::size_t count, std::int64_t index,
                          std::int64_t window_us, std::uint64_t seed);

struct ScriptedSaccade {
  std::int64_t t_start_us = 0;
  std::int64_t duration_us = 40000;
  Point2 target;
};

struct RecordingSpec {
  SensorSize sensor{};
  double radius_px = 10.0;
  Point2 start{173.0, 130.0};
  /// Must be ordered and non-overlapping.
  std::vector<ScriptedSaccade> saccades;
  std::int64_t duration_us = 500000;
  /// Background events per second over the whole sensor.
  double noise_rate_hz = 1000.0;
  int events_per_crossing = 2;
  std::int64_t step_us = 100;
  std::uint64_t seed = 0;
};

/// Ground-truth pupil center at time t (linear motion during saccades).
Point2 pupil_center_at(const RecordingSpec& spec, std::int64_t t_us);

EventStream simulate_recording(const RecordingSpec& spec);

}  // namespace eyelabel::sim
