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

#include "eyelabel/movement_detector.hpp"

#include <array>
#include <stdexcept>

namespace eyelabel {
namespace {

constexpr std::array<std::pair<SaccadeState, std::string_view>, 5> kNames{{
    {SaccadeState::kNone, "NONE"},
    {SaccadeState::kStart, "SACCADE_START"},
    {SaccadeState::kInProgress, "SACCADE_IN_PROGRESS"},
    {SaccadeState::kEnd, "SACCADE_END"},
    {SaccadeState::kStartEnd, "SACCADE_START_END"},
}};

}  // namespace

std::string_view to_string(SaccadeState s) noexcept {
  for (const auto& [state, name] : kNames) {
    if (state == s) return name;
  }
  return "NONE";
}

std::optional<SaccadeState> parse_saccade_state(std::string_view s) noexcept {
  for (const auto& [state, name] : kNames) {
    if (name == s) return state;
  }
  return std::nullopt;
}

std::vector<SaccadeState> detect_saccades(std::span<const std::uint64_t> event_counts,
                                          const DetectorConfig& config) {
  if (config.event_threshold == 0) throw std::invalid_argument("event_threshold must be positive");
  const std::size_t n = event_counts.size();
  std::vector<SaccadeState> states(n, SaccadeState::kNone);
  auto active = [&](std::size_t i) { return event_counts[i] > config.event_threshold; };
  for (std::size_t i = 0; i < n; ++i) {
    if (!active(i)) continue;
    const bool first = i == 0 || !active(i - 1);
    const bool last = i + 1 == n || !active(i + 1);
    states[i] = first && last ? SaccadeState::kStartEnd
                : first      ? SaccadeState::kStart
                : last       ? SaccadeState::kEnd
                             : SaccadeState::kInProgress;
  }
  return states;
}

std::vector<SaccadeState> detect_saccades(std::span<const PolarityFrame> frames,
                                          const DetectorConfig& config) {
  std::vector<std::uint64_t> counts;
  counts.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].index <= frames[i - 1].index) {
      throw std::invalid_argument("frames must be ordered by index");
    }
    counts.push_back(frames[i].total_events);
  }
  return detect_saccades(std::span<const std::uint64_t>(counts), config);
}

std::size_t count_saccades(std::span<const SaccadeState> states) noexcept {
  std::size_t n = 0;
  for (const auto s : states) {
    if (s == SaccadeState::kStart || s == SaccadeState::kStartEnd) ++n;
  }
  return n;
}

}  // namespace eyelabel
