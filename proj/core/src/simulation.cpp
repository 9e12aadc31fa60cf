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

#include "eyelabel/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace eyelabel::sim {
namespace {

bool inside(Point2 c, double r, int x, int y) {
  const double dx = x - c.x;
  const double dy = y - c.y;
  return dx * dx + dy * dy <= r * r;
}

// Emits crossing events for the pupil moving from `from` to `to` during
// [t0, t1).
void emit_motion(std::vector<Event>& out, SensorSize sensor, double r, Point2 from, Point2 to,
                 std::int64_t t0, std::int64_t t1, int per_crossing, std::mt19937_64& rng) {
  if (t1 <= t0) return;
  std::uniform_int_distribution<std::int64_t> when(t0, t1 - 1);
  const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(from.x, to.x) - r)) - 1);
  const int x_hi = std::min(sensor.width - 1, static_cast<int>(std::ceil(std::max(from.x, to.x) + r)) + 1);
  const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(from.y, to.y) - r)) - 1);
  const int y_hi = std::min(sensor.height - 1, static_cast<int>(std::ceil(std::max(from.y, to.y) + r)) + 1);
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const bool was = inside(from, r, x, y);
      const bool now = inside(to, r, x, y);
      if (was == now) continue;
      const Polarity p = now ? Polarity::kPositive : Polarity::kNegative;
      for (int k = 0; k < per_crossing; ++k) out.push_back({when(rng), x, y, p});
    }
  }
}

void emit_noise(std::vector<Event>& out, SensorSize sensor, std::size_t count, std::int64_t t0,
                std::int64_t t1, std::mt19937_64& rng) {
  if (t1 <= t0) return;
  std::uniform_int_distribution<std::int64_t> when(t0, t1 - 1);
  std::uniform_int_distribution<int> xs(0, sensor.width - 1);
  std::uniform_int_distribution<int> ys(0, sensor.height - 1);
  std::bernoulli_distribution positive(0.5);
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t t = when(rng);
    const int x = xs(rng);
    const int y = ys(rng);
    out.push_back({t, x, y, positive(rng) ? Polarity::kPositive : Polarity::kNegative});
  }
}

EventStream finish(std::vector<Event> events, SensorSize sensor) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
  EventStream s;
  s.events = std::move(events);
  s.sensor = sensor;
  return s;
}

}  // namespace

EventStream simulate_moving_pupil(const PupilFrameSpec& spec) {
  if (spec.substeps < 1 || spec.window_us < spec.substeps) {
    throw std::invalid_argument("substeps must be in [1, window_us]");
  }
  const double norm = std::hypot(spec.heading.x, spec.heading.y);
  if (!(norm > 0.0)) throw std::invalid_argument("heading must be non-zero");
  const Point2 u{spec.heading.x / norm, spec.heading.y / norm};
  std::mt19937_64 rng(spec.seed);
  std::vector<Event> events;
  const std::int64_t t0 = spec.index * spec.window_us;
  auto center_at = [&](double frac) {
    const double s = (frac - 0.5) * spec.displacement_px;
    return Point2{spec.center.x + s * u.x, spec.center.y + s * u.y};
  };
  for (int k = 0; k < spec.substeps; ++k) {
    const std::int64_t a = t0 + spec.window_us * k / spec.substeps;
    const std::int64_t b = t0 + spec.window_us * (k + 1) / spec.substeps;
    emit_motion(events, spec.sensor, spec.radius_px, center_at(double(k) / spec.substeps),
                center_at(double(k + 1) / spec.substeps), a, b, spec.events_per_crossing, rng);
  }
  emit_noise(events, spec.sensor, spec.noise_events, t0, t0 + spec.window_us, rng);
  return finish(std::move(events), spec.sensor);
}

PolarityFrame simulate_moving_pupil_frame(const PupilFrameSpec& spec) {
  const auto stream = simulate_moving_pupil(spec);
  return make_frame(stream.events, spec.index, spec.window_us, spec.sensor);
}

EventStream uniform_noise(SensorSize sensor, std::size_t count, std::int64_t index,
                          std::int64_t window_us, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Event> events;
  events.reserve(count);
  emit_noise(events, sensor, count, index * window_us, (index + 1) * window_us, rng);
  return finish(std::move(events), sensor);
}

Point2 pupil_center_at(const RecordingSpec& spec, std::int64_t t_us) {
  Point2 pos = spec.start;
  for (const auto& s : spec.saccades) {
    if (t_us < s.t_start_us) break;
    const std::int64_t t_end = s.t_start_us + s.duration_us;
    if (t_us >= t_end || s.duration_us <= 0) {
      pos = s.target;
      continue;
    }
    const double f = static_cast<double>(t_us - s.t_start_us) / static_cast<double>(s.duration_us);
    return {pos.x + f * (s.target.x - pos.x), pos.y + f * (s.target.y - pos.y)};
  }
  return pos;
}

EventStream simulate_recording(const RecordingSpec& spec) {
  if (spec.step_us <= 0 || spec.duration_us <= 0) {
    throw std::invalid_argument("step_us and duration_us must be positive");
  }
  for (std::size_t i = 1; i < spec.saccades.size(); ++i) {
    const auto& prev = spec.saccades[i - 1];
    if (spec.saccades[i].t_start_us < prev.t_start_us + prev.duration_us) {
      throw std::invalid_argument("scripted saccades overlap or are out of order");
    }
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<Event> events;
  for (std::int64_t t = 0; t < spec.duration_us; t += spec.step_us) {
    const std::int64_t t1 = std::min(spec.duration_us, t + spec.step_us);
    const Point2 from = pupil_center_at(spec, t);
    const Point2 to = pupil_center_at(spec, t1);
    if (from != to) {
      emit_motion(events, spec.sensor, spec.radius_px, from, to, t, t1, spec.events_per_crossing, rng);
    }
  }
  // Poisson-distributed background noise, generated per simulation step.
  const double per_step = spec.noise_rate_hz * static_cast<double>(spec.step_us) * 1e-6;
  std::poisson_distribution<std::size_t> noise_count(per_step);
  for (std::int64_t t = 0; t < spec.duration_us; t += spec.step_us) {
    const std::int64_t t1 = std::min(spec.duration_us, t + spec.step_us);
    emit_noise(events, spec.sensor, per_step > 0.0 ? noise_count(rng) : 0, t, t1, rng);
  }
  return finish(std::move(events), spec.sensor);
}

}  // namespace eyelabel::sim
