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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eyelabel/error.hpp"
#include "eyelabel/geometry.hpp"
#include "eyelabel/movement_detector.hpp"

namespace eyelabel {

enum class BlinkState : std::uint8_t { kNone, kStart, kInProgress, kEnd };
enum class AnnotationSource : std::uint8_t { kAuto, kHuman };

std::string_view to_string(BlinkState s) noexcept;
std::optional<BlinkState> parse_blink_state(std::string_view s) noexcept;
std::string_view to_string(AnnotationSource s) noexcept;
std::optional<AnnotationSource> parse_annotation_source(std::string_view s) noexcept;

struct FrameAnnotation {
  std::int64_t frame_index = 0;
  std::int64_t t_start_us = 0;
  std::uint64_t event_count = 0;
  std::optional<Point2> center;
  SaccadeState saccade_state = SaccadeState::kNone;
  BlinkState blink_state = BlinkState::kNone;
  AnnotationSource source = AnnotationSource::kAuto;
  bool reviewed = false;

  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

enum class StoreErrorKind {
  kMalformedRow,
  kDuplicateFrameIndex,
  kInvalidRecord,
  kUnknownFrame,
  kInvalidPatch,
  kRevisionConflict,
  kIo,
};

class StoreError : public TypedError<StoreErrorKind> {
 public:
  StoreError(StoreErrorKind kind, const std::string& what, std::size_t line_no = 0)
      : TypedError(kind, what), line_no_(line_no) {}
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

/// Centers are stored with two decimals. Rounding a coordinate through this
/// makes the CSV round trip exact.
double quantize_coordinate(double v) noexcept;

inline constexpr std::string_view kAnnotationCsvHeader =
    "frame_index,t_start_us,event_count,center_x,center_y,saccade_state,blink_state,source,reviewed";

/// Requires records sorted by strictly increasing frame_index.
void save_annotations(std::ostream& sink, std::span<const FrameAnnotation> records);
/// Atomic replace: writes a temporary file next to `path` and renames it.
void save_annotations_file(const std::string& path, std::span<const FrameAnnotation> records);

/// Returns records sorted by frame_index. Throws kMalformedRow (with line
/// number) or kDuplicateFrameIndex.
std::vector<FrameAnnotation> load_annotations(std::istream& source);
std::vector<FrameAnnotation> load_annotations_file(const std::string& path);

/// Partial update. An engaged `center` holding nullopt clears the center.
struct AnnotationPatch {
  std::optional<std::optional<Point2>> center;
  std::optional<SaccadeState> saccade_state;
  std::optional<BlinkState> blink_state;

  bool empty() const noexcept { return !center && !saccade_state && !blink_state; }
};

struct AuditEntry {
  std::string timestamp;
  std::int64_t frame_index = 0;
  /// "center", "saccade_state", "blink_state", "reviewed" or
  /// "anomaly_dismissed".
  std::string field;
  std::string old_value;
  std::string new_value;

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

std::string to_json_line(const AuditEntry& entry);
AuditEntry parse_audit_line(const std::string& line);
std::vector<AuditEntry> load_audit_log(std::istream& in);

/// In-memory annotation set for one recording. Not internally synchronised:
/// callers serialise writers and take snapshots for concurrent readers.
class AnnotationStore {
 public:
  using Clock = std::function<std::string()>;
  using AuditSink = std::function<void(const AuditEntry&)>;

  AnnotationStore(std::vector<FrameAnnotation> records, SensorSize sensor);

  SensorSize sensor() const noexcept { return sensor_; }
  std::span<const FrameAnnotation> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  const FrameAnnotation* find(std::int64_t frame_index) const noexcept;
  /// Throws kUnknownFrame.
  const FrameAnnotation& at(std::int64_t frame_index) const;
  /// Starts at 0 and increments with every applied correction of the frame.
  std::uint64_t revision(std::int64_t frame_index) const;

  /// Applies the patch, marks the record HUMAN and reviewed, and appends one
  /// audit entry per changed field (or a single "reviewed" entry when no
  /// field changed). When `expected_revision` is given and
  /// differs from the current revision nothing changes and
  /// kRevisionConflict is thrown.
  const FrameAnnotation& apply_correction(std::int64_t frame_index, const AnnotationPatch& patch,
                                          std::optional<std::uint64_t> expected_revision = {});

  /// Returns false when the anomaly was already dismissed.
  bool dismiss_anomaly(std::int64_t anomaly_id);
  const std::set<std::int64_t>& dismissed_anomalies() const noexcept { return dismissed_; }
  void set_dismissed_anomalies(std::set<std::int64_t> ids) { dismissed_ = std::move(ids); }

  const std::vector<AuditEntry>& audit_log() const noexcept { return audit_; }
  void set_audit_sink(AuditSink sink) { sink_ = std::move(sink); }
  void set_clock(Clock clock) { clock_ = std::move(clock); }

 private:
  std::size_t position(std::int64_t frame_index) const;
  void record(std::int64_t frame_index, std::string field, std::string old_value,
              std::string new_value);

  SensorSize sensor_;
  std::vector<FrameAnnotation> records_;
  std::vector<std::uint64_t> revisions_;
  std::set<std::int64_t> dismissed_;
  std::vector<AuditEntry> audit_;
  AuditSink sink_;
  Clock clock_;
};

/// Re-applies record-level audit entries to `original`.
std::vector<FrameAnnotation> replay_audit(std::vector<FrameAnnotation> original,
                                          std::span<const AuditEntry> log);

struct DatasetStats {
  std::uint64_t frames_analyzed = 0;
  std::uint64_t annotated_frames = 0;
  std::uint64_t saccade_count = 0;
  std::uint64_t blink_count = 0;
  std::uint64_t eye_center_positions = 0;

  DatasetStats& operator+=(const DatasetStats& o) noexcept;
  friend DatasetStats operator+(DatasetStats a, const DatasetStats& b) noexcept { return a += b; }
  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

/// Number of saccade runs in frame order. A run opens at SACCADE_START or
/// SACCADE_START_END, or at any in-run label not preceded by an open run,
/// and closes at SACCADE_END, SACCADE_START_END or NONE.
std::uint64_t count_saccade_runs(std::span<const FrameAnnotation> records) noexcept;
std::uint64_t count_blink_runs(std::span<const FrameAnnotation> records) noexcept;

/// frames_analyzed counts every record; annotated_frames counts records with
/// event_count > min_event_threshold that carry a center, a non-NONE state or
/// a review mark.
DatasetStats compute_stats(std::span<const FrameAnnotation> records,
                           std::uint64_t min_event_threshold);

struct UserStats {
  std::string user;
  DatasetStats stats;
};

/// Statistic rows by user columns plus a Total column.
std::string format_stats_table(std::span<const UserStats> users);

/// Per-recording sidecar stored next to the annotation CSV.
struct RecordingMeta {
  std::string recording_id;
  std::string user;
  std::uint64_t min_event_threshold = 30;
  std::int64_t window_us = 5000;
  SensorSize sensor{};
  std::set<std::int64_t> dismissed_anomalies;

  friend bool operator==(const RecordingMeta&, const RecordingMeta&) = default;
};

std::string meta_path_for(const std::string& annotation_path);
RecordingMeta load_meta_file(const std::string& path);
void save_meta_file(const std::string& path, const RecordingMeta& meta);

}  // namespace eyelabel
