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
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "eyelabel/error.hpp"
#include "eyelabel/geometry.hpp"

namespace eyelabel {

enum class Polarity : std::int8_t { kNegative = -1, kPositive = 1 };

/// One asynchronous camera event.
struct Event {
  std::int64_t t_us = 0;
  int x = 0;
  int y = 0;
  Polarity polarity = Polarity::kPositive;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered, bounds-checked event sequence plus sensor metadata.
/// Immutable once parsed; share freely between readers.
struct EventStream {
  std::vector<Event> events;
  SensorSize sensor;
  /// Events discarded by OutOfBoundsPolicy::kDrop during parsing.
  std::size_t dropped_out_of_bounds = 0;

  std::size_t count() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }
  std::int64_t t_first_us() const noexcept { return events.empty() ? 0 : events.front().t_us; }
  std::int64_t t_last_us() const noexcept { return events.empty() ? 0 : events.back().t_us; }
};

enum class IngestErrorKind {
  kMalformedLine,
  kNonMonotonicTimestamp,
  kOutOfBounds,
  kEmptyStream,
  kInvalidConfig,
};

class IngestError : public TypedError<IngestErrorKind> {
 public:
  IngestError(IngestErrorKind kind, std::size_t line_no, const std::string& what)
      : TypedError(kind, what), line_no_(line_no) {}
  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

enum class TimeUnit { kNanoseconds, kMicroseconds, kMilliseconds, kSeconds };
enum class OutOfBoundsPolicy { kError, kDrop };
enum class OrderingPolicy { kStrict, kSortStable };

struct IngestConfig {
  /// Zero-based column index of each field within a line.
  int col_t = 0;
  int col_x = 1;
  int col_y = 2;
  int col_p = 3;
  /// '\0' splits on any run of whitespace; any other character is a hard
  /// delimiter (surrounding whitespace is trimmed).
  char delimiter = '\0';
  TimeUnit time_unit = TimeUnit::kMicroseconds;
  SensorSize sensor{};
  OutOfBoundsPolicy out_of_bounds = OutOfBoundsPolicy::kError;
  OrderingPolicy ordering = OrderingPolicy::kStrict;

  /// Sets the four column indices from a spec such as "t,x,y,p" or "x y p t".
  void set_column_order(const std::string& order);
  std::string column_order() const;

  /// Applies recognised keys (columns, delimiter, time_unit, width, height,
  /// out_of_bounds, ordering) and ignores the rest.
  void apply(const std::map<std::string, std::string>& kv);
};

TimeUnit parse_time_unit(const std::string& s);
std::string to_string(TimeUnit unit);

/// Parses the text event format. Blank lines and lines starting with '#' are
/// skipped. Polarity 1 is positive; 0 or -1 is negative.
EventStream parse_events(std::istream& source, const IngestConfig& config = {});
EventStream parse_events_file(const std::string& path, const IngestConfig& config = {});

/// Writes events as "t x y p" lines with integer microseconds and p in {0,1}.
/// parse_events with the default column layout inverts this exactly.
void write_events(std::ostream& sink, const EventStream& stream);

struct ValidationReport {
  std::size_t count = 0;
  std::int64_t duration_us = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t out_of_bounds = 0;
  std::size_t dropped_out_of_bounds = 0;
  std::int64_t max_gap_us = 0;
  bool sorted = true;
};

ValidationReport validate_stream(const EventStream& stream);

}  // namespace eyelabel
