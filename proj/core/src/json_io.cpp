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

#include "eyelabel/json_io.hpp"

namespace eyelabel {

using nlohmann::json;

std::string_view to_string(DeltaMetric m) noexcept {
  return m == DeltaMetric::kEuclidean ? "euclidean" : "max";
}

void to_json(json& j, const Point2& p) { j = json{{"x", p.x}, {"y", p.y}}; }

void to_json(json& j, const FrameAnnotation& a) {
  j = json{{"frame_index", a.frame_index},
           {"t_start_us", a.t_start_us},
           {"event_count", a.event_count},
           {"center", a.center ? json(*a.center) : json(nullptr)},
           {"saccade_state", to_string(a.saccade_state)},
           {"blink_state", to_string(a.blink_state)},
           {"source", to_string(a.source)},
           {"reviewed", a.reviewed}};
}

void from_json(const json& j, FrameAnnotation& a) {
  a.frame_index = j.at("frame_index").get<std::int64_t>();
  a.t_start_us = j.at("t_start_us").get<std::int64_t>();
  a.event_count = j.at("event_count").get<std::uint64_t>();
  const auto& c = j.at("center");
  if (c.is_null()) a.center.reset();
  else a.center = Point2{c.at("x").get<double>(), c.at("y").get<double>()};
  const auto sac = parse_saccade_state(j.at("saccade_state").get<std::string>());
  const auto blink = parse_blink_state(j.at("blink_state").get<std::string>());
  const auto src = parse_annotation_source(j.at("source").get<std::string>());
  if (!sac || !blink || !src) throw std::invalid_argument("unknown label in annotation JSON");
  a.saccade_state = *sac;
  a.blink_state = *blink;
  a.source = *src;
  a.reviewed = j.at("reviewed").get<bool>();
}

void to_json(json& j, const DeltaEntry& e) {
  j = json{{"frame_index_prev", e.frame_index_prev},
           {"frame_index_next", e.frame_index_next},
           {"dx", e.dx},
           {"dy", e.dy},
           {"gap_frames", e.gap_frames}};
}

void from_json(const json& j, DeltaEntry& e) {
  e.frame_index_prev = j.at("frame_index_prev").get<std::int64_t>();
  e.frame_index_next = j.at("frame_index_next").get<std::int64_t>();
  e.dx = j.at("dx").get<double>();
  e.dy = j.at("dy").get<double>();
  e.gap_frames = j.at("gap_frames").get<std::int64_t>();
}

void to_json(json& j, const AnomalyReport& r) {
  j = json{{"threshold_px", r.threshold_px},
           {"metric", to_string(r.metric)},
           {"scale_by_gap", r.scale_by_gap},
           {"anomalies", r.anomalies}};
}

void to_json(json& j, const DatasetStats& s) {
  j = json{{"frames_analyzed", s.frames_analyzed},
           {"annotated_frames", s.annotated_frames},
           {"saccade_count", s.saccade_count},
           {"blink_count", s.blink_count},
           {"eye_center_positions", s.eye_center_positions}};
}

void to_json(json& j, const RunReport& r) {
  json failures = json::array();
  for (const auto& [frame, reason] : r.failures) {
    failures.push_back(json{{"frame_index", frame}, {"reason", reason}});
  }
  j = json{{"frames", r.frames},
           {"events", r.events},
           {"active_frames", r.active_frames},
           {"saccade_count", r.saccade_count},
           {"centers", r.centers},
           {"no_signal", r.no_signal},
           {"fit_failures", r.fit_failures},
           {"failures", failures}};
}

void to_json(json& j, const ValidationReport& r) {
  j = json{{"count", r.count},
           {"duration_us", r.duration_us},
           {"positive", r.positive},
           {"negative", r.negative},
           {"out_of_bounds", r.out_of_bounds},
           {"dropped_out_of_bounds", r.dropped_out_of_bounds},
           {"max_gap_us", r.max_gap_us},
           {"sorted", r.sorted}};
}

void to_json(json& j, const AuditEntry& e) {
  j = json{{"timestamp", e.timestamp},
           {"frame_index", e.frame_index},
           {"field", e.field},
           {"old", e.old_value},
           {"new", e.new_value}};
}

json frame_events_json(const PolarityFrame& frame) {
  json pixels = json::array();
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const auto p = frame.pos(x, y);
      const auto n = frame.neg(x, y);
      if (p != 0 || n != 0) pixels.push_back(json::array({x, y, p, n}));
    }
  }
  return json{{"frame_index", frame.index},   {"t_start_us", frame.t_start_us},
              {"t_end_us", frame.t_end_us},    {"width", frame.width()},
              {"height", frame.height()},      {"total_events", frame.total_events},
              {"pixels", std::move(pixels)}};
}

}  // namespace eyelabel
