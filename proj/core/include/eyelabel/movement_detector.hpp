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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eyelabel/frame_accumulator.hpp"

namespace eyelabel {

enum class SaccadeState : std::uint8_t {
  kNone,
  kStart,
  kInProgress,
  kEnd,
  kStartEnd,  // a saccade that is active for exactly one frame
};

std::string_view to_string(SaccadeState s) noexcept;
std::optional<SaccadeState> parse_saccade_state(std::string_view s) noexcept;

struct DetectorConfig {
  /// A frame is active when its event count is strictly greater than this.
  std::uint64_t event_threshold = 150;
};

/// Labels runs of active frames. The first active frame of a run is kStart,
/// the last is kEnd, frames in between are kInProgress, and a run of length
/// one is kStartEnd. Inactive frames are kNone.
std::vector<SaccadeState> detect_saccades(std::span<const std::uint64_t> event_counts,
                                          const DetectorConfig& config = {});
std::vector<SaccadeState> detect_saccades(std::span<const PolarityFrame> frames,
                                          const DetectorConfig& config = {});

inline bool is_active(SaccadeState s) noexcept { return s != SaccadeState::kNone; }

/// Number of saccades, i.e. kStart plus kStartEnd labels.
std::size_t count_saccades(std::span<const SaccadeState> states) noexcept;

}  // namespace eyelabel
