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

#include "eyelabel/annotation_store.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace eyelabel {
namespace {

constexpr std::array<std::pair<BlinkState, std::string_view>, 4> kBlinkNames{{
    {BlinkState::kNone, "NONE"},
    {BlinkState::kStart, "BLINK_START"},
    {BlinkState::kInProgress, "BLINK_IN_PROGRESS"},
    {BlinkState::kEnd, "BLINK_END"},
}};

std::string format_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string format_center(const std::optional<Point2>& c) {
  if (!c) return {};
  return format_coord(c->x) + "," + format_coord(c->y);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view tok, T& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return !tok.empty() && ec == std::errc{} && ptr == end;
}

bool parse_coord(std::string_view tok, double& out) {
  std::string owned(tok);
  char* end = nullptr;
  out = std::strtod(owned.c_str(), &end);
  return !owned.empty() && end == owned.c_str() + owned.size() && std::isfinite(out);
}

std::optional<Point2> parse_center(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const auto parts = split_commas(s);
  Point2 p;
  if (parts.size() != 2 || !parse_coord(parts[0], p.x) || !parse_coord(parts[1], p.y)) {
    throw StoreError(StoreErrorKind::kInvalidRecord, "bad center value '" + std::string(s) + "'");
  }
  return p;
}

StoreError row_error(std::size_t line_no, const std::string& msg) {
  return StoreError(StoreErrorKind::kMalformedRow, "line " + std::to_string(line_no) + ": " + msg,
                    line_no);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0')
     << ms.count() << 'Z';
  return os.str();
}

void check_sorted(std::span<const FrameAnnotation> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].frame_index == records[i - 1].frame_index) {
      throw StoreError(StoreErrorKind::kDuplicateFrameIndex,
                       "duplicate frame_index " + std::to_string(records[i].frame_index));
    }
    if (records[i].frame_index < records[i - 1].frame_index) {
      throw StoreError(StoreErrorKind::kInvalidRecord, "annotations must be sorted by frame_index");
    }
  }
}

void apply_field(FrameAnnotation& rec, const AuditEntry& e) {
  if (e.field == "center") {
    rec.center = parse_center(e.new_value);
  } else if (e.field == "saccade_state") {
    rec.saccade_state = parse_saccade_state(e.new_value).value_or(rec.saccade_state);
  } else if (e.field == "blink_state") {
    rec.blink_state = parse_blink_state(e.new_value).value_or(rec.blink_state);
  } else if (e.field != "reviewed") {
    return;
  }
  rec.source = AnnotationSource::kHuman;
  rec.reviewed = true;
}

}  // namespace

std::string_view to_string(BlinkState s) noexcept {
  for (const auto& [state, name] : kBlinkNames) {
    if (state == s) return name;
  }
  return "NONE";
}

std::optional<BlinkState> parse_blink_state(std::string_view s) noexcept {
  for (const auto& [state, name] : kBlinkNames) {
    if (name == s) return state;
  }
  return std::nullopt;
}

std::string_view to_string(AnnotationSource s) noexcept {
  return s == AnnotationSource::kHuman ? "HUMAN" : "AUTO";
}

std::optional<AnnotationSource> parse_annotation_source(std::string_view s) noexcept {
  if (s == "AUTO") return AnnotationSource::kAuto;
  if (s == "HUMAN") return AnnotationSource::kHuman;
  return std::nullopt;
}

double quantize_coordinate(double v) noexcept { return std::round(v * 100.0) / 100.0; }

void save_annotations(std::ostream& sink, std::span<const FrameAnnotation> records) {
  check_sorted(records);
  sink << kAnnotationCsvHeader << '\n';
  for (const auto& r : records) {
    sink << r.frame_index << ',' << r.t_start_us << ',' << r.event_count << ',';
    if (r.center) sink << format_coord(r.center->x) << ',' << format_coord(r.center->y);
    else sink << ',';
    sink << ',' << to_string(r.saccade_state) << ',' << to_string(r.blink_state) << ','
         << to_string(r.source) << ',' << (r.reviewed ? "true" : "false") << '\n';
  }
}

void save_annotations_file(const std::string& path, std::span<const FrameAnnotation> records) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw StoreError(StoreErrorKind::kIo, "cannot write '" + tmp + "'");
    save_annotations(out, records);
    out.flush();
    if (!out) throw StoreError(StoreErrorKind::kIo, "failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw StoreError(StoreErrorKind::kIo, "cannot replace '" + path + "': " + ec.message());
}

std::vector<FrameAnnotation> load_annotations(std::istream& source) {
  std::vector<FrameAnnotation> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kAnnotationCsvHeader) throw row_error(line_no, "unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = split_commas(line);
    if (f.size() != 9) throw row_error(line_no, "expected 9 columns, got " + std::to_string(f.size()));
    FrameAnnotation r;
    if (!parse_int(f[0], r.frame_index) || !parse_int(f[1], r.t_start_us) ||
        !parse_int(f[2], r.event_count)) {
      throw row_error(line_no, "bad integer field");
    }
    if (f[3].empty() != f[4].empty()) throw row_error(line_no, "center_x and center_y must both be set");
    if (!f[3].empty()) {
      Point2 c;
      if (!parse_coord(f[3], c.x) || !parse_coord(f[4], c.y)) throw row_error(line_no, "bad center");
      r.center = c;
    }
    const auto sac = parse_saccade_state(f[5]);
    const auto blink = parse_blink_state(f[6]);
    const auto src = parse_annotation_source(f[7]);
    if (!sac || !blink || !src) throw row_error(line_no, "unknown state or source label");
    r.saccade_state = *sac;
    r.blink_state = *blink;
    r.source = *src;
    if (f[8] == "true") r.reviewed = true;
    else if (f[8] == "false") r.reviewed = false;
    else throw row_error(line_no, "reviewed must be true or false");
    if (r.source == AnnotationSource::kHuman && !r.reviewed) {
      throw row_error(line_no, "HUMAN records must be reviewed");
    }
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const FrameAnnotation& a, const FrameAnnotation& b) {
    return a.frame_index < b.frame_index;
  });
  check_sorted(out);
  return out;
}

std::vector<FrameAnnotation> load_annotations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError(StoreErrorKind::kIo, "cannot open '" + path + "'");
  return load_annotations(in);
}

std::string to_json_line(const AuditEntry& e) {
  const nlohmann::json j{{"timestamp", e.timestamp}, {"frame_index", e.frame_index},
                         {"field", e.field},         {"old", e.old_value},
                         {"new", e.new_value}};
  return j.dump();
}

AuditEntry parse_audit_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    return AuditEntry{j.at("timestamp").get<std::string>(), j.at("frame_index").get<std::int64_t>(),
                      j.at("field").get<std::string>(), j.at("old").get<std::string>(),
                      j.at("new").get<std::string>()};
  } catch (const nlohmann::json::exception& ex) {
    throw StoreError(StoreErrorKind::kMalformedRow, std::string("bad audit line: ") + ex.what());
  }
}

std::vector<AuditEntry> load_audit_log(std::istream& in) {
  std::vector<AuditEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_audit_line(line));
  }
  return out;
}

AnnotationStore::AnnotationStore(std::vector<FrameAnnotation> records, SensorSize sensor)
    : sensor_(sensor), records_(std::move(records)), clock_(utc_now) {
  check_sorted(records_);
  for (const auto& r : records_) {
    if (r.center && !sensor_.contains(*r.center)) {
      throw StoreError(StoreErrorKind::kInvalidRecord,
                       "frame " + std::to_string(r.frame_index) + ": center outside sensor");
    }
    if (r.source == AnnotationSource::kHuman && !r.reviewed) {
      throw StoreError(StoreErrorKind::kInvalidRecord,
                       "frame " + std::to_string(r.frame_index) + ": HUMAN record not reviewed");
    }
  }
  revisions_.assign(records_.size(), 0);
}

const FrameAnnotation* AnnotationStore::find(std::int64_t frame_index) const noexcept {
  const auto it = std::lower_bound(records_.begin(), records_.end(), frame_index,
                                   [](const FrameAnnotation& r, std::int64_t i) { return r.frame_index < i; });
  return it != records_.end() && it->frame_index == frame_index ? &*it : nullptr;
}

std::size_t AnnotationStore::position(std::int64_t frame_index) const {
  const auto* rec = find(frame_index);
  if (rec == nullptr) {
    throw StoreError(StoreErrorKind::kUnknownFrame, "unknown frame " + std::to_string(frame_index));
  }
  return static_cast<std::size_t>(rec - records_.data());
}

const FrameAnnotation& AnnotationStore::at(std::int64_t frame_index) const {
  return records_[position(frame_index)];
}

std::uint64_t AnnotationStore::revision(std::int64_t frame_index) const {
  return revisions_[position(frame_index)];
}

void AnnotationStore::record(std::int64_t frame_index, std::string field, std::string old_value,
                             std::string new_value) {
  AuditEntry e{clock_ ? clock_() : std::string{}, frame_index, std::move(field), std::move(old_value),
               std::move(new_value)};
  audit_.push_back(e);
  if (sink_) sink_(audit_.back());
}

const FrameAnnotation& AnnotationStore::apply_correction(std::int64_t frame_index,
                                                         const AnnotationPatch& patch,
                                                         std::optional<std::uint64_t> expected_revision) {
  const std::size_t pos = position(frame_index);
  if (expected_revision && *expected_revision != revisions_[pos]) {
    throw StoreError(StoreErrorKind::kRevisionConflict,
                     "frame " + std::to_string(frame_index) + " is at revision " +
                         std::to_string(revisions_[pos]) + ", patch expected " +
                         std::to_string(*expected_revision));
  }
  std::optional<std::optional<Point2>> new_center;
  if (patch.center) {
    if (*patch.center) {
      const Point2 c = **patch.center;
      if (!std::isfinite(c.x) || !std::isfinite(c.y) || !sensor_.contains(c)) {
        throw StoreError(StoreErrorKind::kInvalidPatch,
                         "center (" + format_coord(c.x) + ", " + format_coord(c.y) +
                             ") outside the " + std::to_string(sensor_.width) + "x" +
                             std::to_string(sensor_.height) + " sensor");
      }
      new_center = Point2{quantize_coordinate(c.x), quantize_coordinate(c.y)};
    } else {
      new_center = std::optional<Point2>{};
    }
  }

  FrameAnnotation& rec = records_[pos];
  const std::size_t audit_before = audit_.size();
  if (new_center && *new_center != rec.center) {
    record(frame_index, "center", format_center(rec.center), format_center(*new_center));
    rec.center = *new_center;
  }
  if (patch.saccade_state && *patch.saccade_state != rec.saccade_state) {
    record(frame_index, "saccade_state", std::string(to_string(rec.saccade_state)),
           std::string(to_string(*patch.saccade_state)));
    rec.saccade_state = *patch.saccade_state;
  }
  if (patch.blink_state && *patch.blink_state != rec.blink_state) {
    record(frame_index, "blink_state", std::string(to_string(rec.blink_state)),
           std::string(to_string(*patch.blink_state)));
    rec.blink_state = *patch.blink_state;
  }
  // Any field entry implies the review mark on replay; a patch that changes
  // nothing still records the mark itself.
  if (audit_.size() == audit_before && (!rec.reviewed || rec.source != AnnotationSource::kHuman)) {
    record(frame_index, "reviewed", rec.reviewed ? "true" : "false", "true");
  }
  rec.source = AnnotationSource::kHuman;
  rec.reviewed = true;
  ++revisions_[pos];
  return rec;
}

bool AnnotationStore::dismiss_anomaly(std::int64_t anomaly_id) {
  if (!dismissed_.insert(anomaly_id).second) return false;
  record(anomaly_id, "anomaly_dismissed", "false", "true");
  return true;
}

std::vector<FrameAnnotation> replay_audit(std::vector<FrameAnnotation> original,
                                          std::span<const AuditEntry> log) {
  for (const auto& e : log) {
    const auto it = std::lower_bound(original.begin(), original.end(), e.frame_index,
                                     [](const FrameAnnotation& r, std::int64_t i) { return r.frame_index < i; });
    if (it == original.end() || it->frame_index != e.frame_index) continue;
    apply_field(*it, e);
  }
  return original;
}

DatasetStats& DatasetStats::operator+=(const DatasetStats& o) noexcept {
  frames_analyzed += o.frames_analyzed;
  annotated_frames += o.annotated_frames;
  saccade_count += o.saccade_count;
  blink_count += o.blink_count;
  eye_center_positions += o.eye_center_positions;
  return *this;
}

std::uint64_t count_saccade_runs(std::span<const FrameAnnotation> records) noexcept {
  std::uint64_t runs = 0;
  bool open = false;
  for (const auto& r : records) {
    switch (r.saccade_state) {
      case SaccadeState::kNone: open = false; break;
      case SaccadeState::kStartEnd: ++runs; open = false; break;
      case SaccadeState::kStart: ++runs; open = true; break;
      case SaccadeState::kInProgress:
        if (!open) ++runs;
        open = true;
        break;
      case SaccadeState::kEnd:
        if (!open) ++runs;
        open = false;
        break;
    }
  }
  return runs;
}

std::uint64_t count_blink_runs(std::span<const FrameAnnotation> records) noexcept {
  std::uint64_t runs = 0;
  bool open = false;
  for (const auto& r : records) {
    switch (r.blink_state) {
      case BlinkState::kNone: open = false; break;
      case BlinkState::kStart: ++runs; open = true; break;
      case BlinkState::kInProgress:
        if (!open) ++runs;
        open = true;
        break;
      case BlinkState::kEnd:
        if (!open) ++runs;
        open = false;
        break;
    }
  }
  return runs;
}

DatasetStats compute_stats(std::span<const FrameAnnotation> records,
                           std::uint64_t min_event_threshold) {
  DatasetStats s;
  s.frames_analyzed = records.size();
  for (const auto& r : records) {
    const bool labelled = r.center || r.saccade_state != SaccadeState::kNone ||
                          r.blink_state != BlinkState::kNone || r.reviewed;
    if (r.event_count > min_event_threshold && labelled) ++s.annotated_frames;
    if (r.center) ++s.eye_center_positions;
  }
  s.saccade_count = count_saccade_runs(records);
  s.blink_count = count_blink_runs(records);
  return s;
}

std::string format_stats_table(std::span<const UserStats> users) {
  DatasetStats total;
  for (const auto& u : users) total += u.stats;
  std::vector<std::string> headers{"Statistic"};
  for (const auto& u : users) headers.push_back(u.user);
  headers.push_back("Total");

  using Getter = std::uint64_t DatasetStats::*;
  const std::array<std::pair<std::string_view, Getter>, 5> rows{{
      {"Frame analyzed", &DatasetStats::frames_analyzed},
      {"Annotated Frame", &DatasetStats::annotated_frames},
      {"Saccade Counts", &DatasetStats::saccade_count},
      {"Blink Counts", &DatasetStats::blink_count},
      {"Eye Center Position", &DatasetStats::eye_center_positions},
  }};
  std::vector<std::vector<std::string>> cells;
  for (const auto& [label, field] : rows) {
    std::vector<std::string> row{std::string(label)};
    for (const auto& u : users) row.push_back(std::to_string(u.stats.*field));
    row.push_back(std::to_string(total.*field));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : cells) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) os << std::left << std::setw(static_cast<int>(widths[c])) << row[c];
      else os << (c + 1 == row.size() ? " | " : "  ") << std::right
              << std::setw(static_cast<int>(widths[c])) << row[c];
    }
    os << '\n';
  };
  emit(headers);
  std::size_t rule = 0;
  for (const auto w : widths) rule += w + 2;
  os << std::string(rule + 1, '-') << '\n';
  for (const auto& row : cells) emit(row);
  return os.str();
}

std::string meta_path_for(const std::string& annotation_path) {
  return annotation_path + ".meta.json";
}

RecordingMeta load_meta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError(StoreErrorKind::kIo, "cannot open '" + path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    RecordingMeta m;
    m.recording_id = j.value("recording_id", std::string{});
    m.user = j.value("user", std::string{});
    m.min_event_threshold = j.value("min_event_threshold", std::uint64_t{30});
    m.window_us = j.value("window_us", std::int64_t{5000});
    m.sensor.width = j.value("sensor_width", 346);
    m.sensor.height = j.value("sensor_height", 260);
    if (j.contains("dismissed_anomalies")) {
      for (const auto& id : j.at("dismissed_anomalies")) m.dismissed_anomalies.insert(id.get<std::int64_t>());
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw StoreError(StoreErrorKind::kMalformedRow, "bad sidecar '" + path + "': " + ex.what());
  }
}

void save_meta_file(const std::string& path, const RecordingMeta& m) {
  const nlohmann::json j{{"recording_id", m.recording_id},
                         {"user", m.user},
                         {"min_event_threshold", m.min_event_threshold},
                         {"window_us", m.window_us},
                         {"sensor_width", m.sensor.width},
                         {"sensor_height", m.sensor.height},
                         {"dismissed_anomalies", m.dismissed_anomalies}};
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw StoreError(StoreErrorKind::kIo, "cannot write '" + tmp + "'");
    out << j.dump(2) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw StoreError(StoreErrorKind::kIo, "cannot replace '" + path + "': " + ec.message());
}

}  // namespace eyelabel
