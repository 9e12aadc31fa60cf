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

// Hand-built annotation fixture. Counted by hand at min_event_threshold 30:
//   12 frames, 9 annotated (1-7, 9, 11), 2 saccade runs (1-3, 9),
//   1 blink run (5-7), 7 centers (1, 2, 3, 4, 8, 9, 11).

#pragma once

#include <vector>

#include "eyelabel/annotation_store.hpp"
#include "eyelabel/simulation.hpp"

namespace eyelabel::fixture {

inline constexpr DatasetStats kHandCounts{12, 9, 2, 1, 7};

inline std::vector<FrameAnnotation> hand_built() {
  using S = SaccadeState;
  using B = BlinkState;
  auto rec = [](std::int64_t i, std::uint64_t n, std::optional<Point2> c, S s, B b, bool human) {
    return FrameAnnotation{i, i * 5000, n, c, s, b,
                           human ? AnnotationSource::kHuman : AnnotationSource::kAuto, human};
  };
  return {
      rec(0, 10, {}, S::kNone, B::kNone, false),
      rec(1, 200, Point2{120.25, 80.5}, S::kStart, B::kNone, false),
      rec(2, 220, Point2{125.0, 81.75}, S::kInProgress, B::kNone, false),
      rec(3, 180, Point2{131.5, 82.0}, S::kEnd, B::kNone, false),
      rec(4, 40, Point2{132.0, 82.0}, S::kNone, B::kNone, true),
      rec(5, 50, {}, S::kNone, B::kStart, true),
      rec(6, 60, {}, S::kNone, B::kInProgress, true),
      rec(7, 35, {}, S::kNone, B::kEnd, true),
      rec(8, 20, Point2{133.0, 82.0}, S::kNone, B::kNone, false),
      rec(9, 300, Point2{150.0, 90.0}, S::kStartEnd, B::kNone, false),
      rec(10, 31, {}, S::kNone, B::kNone, false),
      rec(11, 100, Point2{151.0, 90.25}, S::kNone, B::kNone, false),
  };
}

/// One second of a 10 px pupil performing three 40 ms saccades in
/// different directions.
inline sim::RecordingSpec three_saccade_recording(std::uint64_t seed = 7) {
  sim::RecordingSpec spec;
  spec.duration_us = 1000000;
  spec.seed = seed;
  spec.start = {150.0, 120.0};
  spec.saccades = {{150000, 40000, {190.0, 120.0}},
                   {450000, 40000, {170.0, 150.0}},
                   {750000, 40000, {140.0, 110.0}}};
  return spec;
}

}  // namespace eyelabel::fixture
