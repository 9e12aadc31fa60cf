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

#include "eyelabel/frame_accumulator.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace eyelabel {
namespace {

void require_window(std::int64_t window_us) {
  if (window_us <= 0) throw std::invalid_argument("window_us must be positive");
}

}  // namespace

std::int64_t frame_count(const EventStream& stream, std::int64_t window_us) {
  require_window(window_us);
  if (stream.empty()) return 0;
  return stream.t_last_us() / window_us + 1;
}

std::span<const Event> events_in_window(const EventStream& stream, std::int64_t index,
                                        std::int64_t window_us) {
  require_window(window_us);
  const std::int64_t t0 = index * window_us;
  const std::int64_t t1 = t0 + window_us;
  auto by_time = [](const Event& e, std::int64_t t) { return e.t_us < t; };
  const auto first = std::lower_bound(stream.events.begin(), stream.events.end(), t0, by_time);
  const auto last = std::lower_bound(first, stream.events.end(), t1, by_time);
  return {first, last};
}

PolarityFrame make_frame(std::span<const Event> events, std::int64_t index,
                         std::int64_t window_us, SensorSize size) {
  require_window(window_us);
  if (index < 0) throw std::invalid_argument("frame index must be non-negative");
  PolarityFrame frame;
  frame.index = index;
  frame.t_start_us = index * window_us;
  frame.t_end_us = frame.t_start_us + window_us;
  frame.size = size;
  const auto n = static_cast<std::size_t>(size.pixel_count());
  frame.pos_counts.assign(n, 0);
  frame.neg_counts.assign(n, 0);
  for (const auto& ev : events) {
    if (ev.t_us < frame.t_start_us || ev.t_us >= frame.t_end_us) {
      throw std::invalid_argument("event at t=" + std::to_string(ev.t_us) +
                                  " outside frame window " + std::to_string(index));
    }
    if (!size.contains(ev.x, ev.y)) throw std::invalid_argument("event outside sensor bounds");
    auto& grid = ev.polarity == Polarity::kPositive ? frame.pos_counts : frame.neg_counts;
    ++grid[frame.offset(ev.x, ev.y)];
  }
  frame.total_events = events.size();
  return frame;
}

PolarityFrame frame_at(const EventStream& stream, std::int64_t index, std::int64_t window_us) {
  return make_frame(events_in_window(stream, index, window_us), index, window_us, stream.sensor);
}

void for_each_frame(const EventStream& stream, std::int64_t window_us,
                    const std::function<void(const PolarityFrame&)>& fn) {
  const std::int64_t n = frame_count(stream, window_us);
  auto it = stream.events.begin();
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t t1 = (i + 1) * window_us;
    auto end = it;
    while (end != stream.events.end() && end->t_us < t1) ++end;
    fn(make_frame(std::span<const Event>(it, end), i, window_us, stream.sensor));
    it = end;
  }
}

std::vector<PolarityFrame> accumulate(const EventStream& stream, std::int64_t window_us) {
  std::vector<PolarityFrame> frames;
  frames.reserve(static_cast<std::size_t>(frame_count(stream, window_us)));
  for_each_frame(stream, window_us, [&](const PolarityFrame& f) { frames.push_back(f); });
  return frames;
}

std::vector<std::uint64_t> frame_event_counts(const EventStream& stream, std::int64_t window_us) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(frame_count(stream, window_us)), 0);
  for (const auto& ev : stream.events) ++counts[static_cast<std::size_t>(ev.t_us / window_us)];
  return counts;
}

RgbImage render_rgb(const PolarityFrame& frame) {
  RgbImage img(frame.width(), frame.height(), colors::kBlack);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const auto p = frame.pos(x, y);
      const auto n = frame.neg(x, y);
      if (p == 0 && n == 0) continue;
      img.set(x, y, p >= n ? colors::kGreen : colors::kRed);
    }
  }
  return img;
}

void write_frame_csv(std::ostream& out, const PolarityFrame& frame) {
  out << "x,y,pos,neg\n";
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const auto p = frame.pos(x, y);
      const auto n = frame.neg(x, y);
      if (p != 0 || n != 0) out << x << ',' << y << ',' << p << ',' << n << '\n';
    }
  }
}

}  // namespace eyelabel
