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
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "eyelabel/event_ingest.hpp"
#include "eyelabel/image.hpp"

namespace eyelabel {

/// 200 Hz: one frame every 5 ms.
inline constexpr std::int64_t kDefaultWindowUs = 5000;

/// Per-pixel positive/negative event counts over [t_start_us, t_end_us).
struct PolarityFrame {
  std::int64_t index = 0;
  std::int64_t t_start_us = 0;
  std::int64_t t_end_us = 0;
  SensorSize size{};
  std::vector<std::uint32_t> pos_counts;  // row-major, size.width * size.height
  std::vector<std::uint32_t> neg_counts;
  std::uint64_t total_events = 0;

  int width() const noexcept { return size.width; }
  int height() const noexcept { return size.height; }
  std::uint32_t pos(int x, int y) const { return pos_counts[offset(x, y)]; }
  std::uint32_t neg(int x, int y) const { return neg_counts[offset(x, y)]; }
  std::size_t offset(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(size.width) +
           static_cast<std::size_t>(x);
  }

  friend bool operator==(const PolarityFrame&, const PolarityFrame&) = default;
};

/// Number of windows needed to cover [0, t_last]; 0 for an empty stream.
std::int64_t frame_count(const EventStream& stream, std::int64_t window_us = kDefaultWindowUs);

/// The contiguous slice of events with t in [index*window, (index+1)*window).
std::span<const Event> events_in_window(const EventStream& stream, std::int64_t index,
                                        std::int64_t window_us = kDefaultWindowUs);

/// Builds frame `index` from events that must all lie inside its window.
PolarityFrame make_frame(std::span<const Event> events, std::int64_t index,
                         std::int64_t window_us, SensorSize size);

PolarityFrame frame_at(const EventStream& stream, std::int64_t index,
                       std::int64_t window_us = kDefaultWindowUs);

/// All frames from index 0 through the window containing the last event,
/// empty windows included. Memory is O(frames * pixels); prefer
/// for_each_frame() for long recordings.
std::vector<PolarityFrame> accumulate(const EventStream& stream,
                                      std::int64_t window_us = kDefaultWindowUs);

/// Streams the same frames as accumulate() one at a time.
void for_each_frame(const EventStream& stream, std::int64_t window_us,
                    const std::function<void(const PolarityFrame&)>& fn);

/// Per-window totals only; element i equals accumulate(...)[i].total_events.
std::vector<std::uint64_t> frame_event_counts(const EventStream& stream,
                                              std::int64_t window_us = kDefaultWindowUs);

/// Green where positives dominate, red where negatives dominate, black where
/// the pixel saw no events. Equal nonzero counts render green.
RgbImage render_rgb(const PolarityFrame& frame);

/// Sparse debug dump: header "x,y,pos,neg" then one row per nonzero pixel in
/// row-major order.
void write_frame_csv(std::ostream& out, const PolarityFrame& frame);

}  // namespace eyelabel
