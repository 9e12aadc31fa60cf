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

#include "eyelabel/event_ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace eyelabel {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits into at most out.size() tokens; returns the number found (which may
// exceed out.size() to signal extra columns, counted but not stored).
std::size_t split(std::string_view line, char delimiter, std::array<std::string_view, 16>& out) {
  std::size_t n = 0;
  auto push = [&](std::string_view tok) {
    if (n < out.size()) out[n] = tok;
    ++n;
  };
  if (delimiter == '\0') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      push(line.substr(i, j - i));
      i = j;
    }
  } else {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(delimiter, start);
      push(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  }
  return n;
}

template <typename T>
bool parse_int(std::string_view tok, T& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_double(std::string_view tok, double& out) {
  // from_chars for floating point is unavailable on some libstdc++ builds.
  std::string owned(tok);
  char* end = nullptr;
  out = std::strtod(owned.c_str(), &end);
  return !owned.empty() && end == owned.c_str() + owned.size() && std::isfinite(out);
}

bool parse_timestamp(std::string_view tok, TimeUnit unit, std::int64_t& t_us) {
  switch (unit) {
    case TimeUnit::kMicroseconds:
      return parse_int(tok, t_us);
    case TimeUnit::kNanoseconds: {
      std::int64_t ns = 0;
      if (!parse_int(tok, ns)) return false;
      t_us = ns / 1000;
      return true;
    }
    case TimeUnit::kMilliseconds:
    case TimeUnit::kSeconds: {
      double v = 0.0;
      if (!parse_double(tok, v)) return false;
      const double scale = unit == TimeUnit::kMilliseconds ? 1e3 : 1e6;
      t_us = std::llround(v * scale);
      return true;
    }
  }
  return false;
}

IngestError line_error(IngestErrorKind kind, std::size_t line_no, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line_no << ": " << msg;
  return IngestError(kind, line_no, os.str());
}

}  // namespace

void IngestConfig::set_column_order(const std::string& order) {
  std::array<std::string_view, 16> toks{};
  const char delim = order.find(',') != std::string::npos ? ',' : '\0';
  const std::size_t n = split(order, delim, toks);
  if (n != 4) {
    throw IngestError(IngestErrorKind::kInvalidConfig, 0,
                      "column order must name exactly t, x, y, p: '" + order + "'");
  }
  int t = -1, x = -1, y = -1, p = -1;
  for (int i = 0; i < 4; ++i) {
    const auto tok = toks[static_cast<std::size_t>(i)];
    int* slot = tok == "t" ? &t : tok == "x" ? &x : tok == "y" ? &y : tok == "p" ? &p : nullptr;
    if (slot == nullptr || *slot != -1) {
      throw IngestError(IngestErrorKind::kInvalidConfig, 0, "bad column order: '" + order + "'");
    }
    *slot = i;
  }
  col_t = t;
  col_x = x;
  col_y = y;
  col_p = p;
}

std::string IngestConfig::column_order() const {
  std::array<char, 4> names{'?', '?', '?', '?'};
  auto put = [&](int col, char name) {
    if (col >= 0 && col < 4) names[static_cast<std::size_t>(col)] = name;
  };
  put(col_t, 't');
  put(col_x, 'x');
  put(col_y, 'y');
  put(col_p, 'p');
  return {names[0], ',', names[1], ',', names[2], ',', names[3]};
}

TimeUnit parse_time_unit(const std::string& s) {
  if (s == "us") return TimeUnit::kMicroseconds;
  if (s == "ns") return TimeUnit::kNanoseconds;
  if (s == "ms") return TimeUnit::kMilliseconds;
  if (s == "s") return TimeUnit::kSeconds;
  throw IngestError(IngestErrorKind::kInvalidConfig, 0, "unknown time unit '" + s + "'");
}

std::string to_string(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kNanoseconds: return "ns";
    case TimeUnit::kMicroseconds: return "us";
    case TimeUnit::kMilliseconds: return "ms";
    case TimeUnit::kSeconds: return "s";
  }
  return "us";
}

void IngestConfig::apply(const std::map<std::string, std::string>& kv) {
  auto as_int = [](const std::string& key, const std::string& v) {
    int out = 0;
    if (!parse_int(std::string_view(v), out)) {
      throw IngestError(IngestErrorKind::kInvalidConfig, 0, key + ": expected integer, got '" + v + "'");
    }
    return out;
  };
  for (const auto& [key, value] : kv) {
    if (key == "columns") {
      set_column_order(value);
    } else if (key == "delimiter") {
      delimiter = (value.empty() || value == "whitespace") ? '\0' : value == "tab" ? '\t' : value.front();
    } else if (key == "time_unit") {
      time_unit = parse_time_unit(value);
    } else if (key == "width") {
      sensor.width = as_int(key, value);
    } else if (key == "height") {
      sensor.height = as_int(key, value);
    } else if (key == "out_of_bounds") {
      if (value != "error" && value != "drop") {
        throw IngestError(IngestErrorKind::kInvalidConfig, 0, "out_of_bounds must be error|drop");
      }
      out_of_bounds = value == "drop" ? OutOfBoundsPolicy::kDrop : OutOfBoundsPolicy::kError;
    } else if (key == "ordering") {
      if (value != "strict" && value != "sort") {
        throw IngestError(IngestErrorKind::kInvalidConfig, 0, "ordering must be strict|sort");
      }
      ordering = value == "sort" ? OrderingPolicy::kSortStable : OrderingPolicy::kStrict;
    }
  }
}

EventStream parse_events(std::istream& source, const IngestConfig& config) {
  if (config.sensor.width <= 0 || config.sensor.height <= 0) {
    throw IngestError(IngestErrorKind::kInvalidConfig, 0, "sensor resolution must be positive");
  }
  const int max_col = std::max({config.col_t, config.col_x, config.col_y, config.col_p});
  if (std::min({config.col_t, config.col_x, config.col_y, config.col_p}) < 0 || max_col >= 16) {
    throw IngestError(IngestErrorKind::kInvalidConfig, 0, "column indices must lie in [0, 16)");
  }

  EventStream stream;
  stream.sensor = config.sensor;
  std::array<std::string_view, 16> toks{};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    const std::size_t n = split(body, config.delimiter, toks);
    if (n <= static_cast<std::size_t>(max_col)) {
      throw line_error(IngestErrorKind::kMalformedLine, line_no, "expected at least " +
                       std::to_string(max_col + 1) + " columns");
    }
    Event ev;
    int p = 0;
    if (!parse_timestamp(toks[static_cast<std::size_t>(config.col_t)], config.time_unit, ev.t_us) ||
        !parse_int(toks[static_cast<std::size_t>(config.col_x)], ev.x) ||
        !parse_int(toks[static_cast<std::size_t>(config.col_y)], ev.y) ||
        !parse_int(toks[static_cast<std::size_t>(config.col_p)], p)) {
      throw line_error(IngestErrorKind::kMalformedLine, line_no, "unparsable field in '" + line + "'");
    }
    if (ev.t_us < 0) {
      throw line_error(IngestErrorKind::kMalformedLine, line_no, "negative timestamp");
    }
    if (p == 1) {
      ev.polarity = Polarity::kPositive;
    } else if (p == 0 || p == -1) {
      ev.polarity = Polarity::kNegative;
    } else {
      throw line_error(IngestErrorKind::kMalformedLine, line_no, "polarity must be 0, 1 or -1");
    }
    if (!config.sensor.contains(ev.x, ev.y)) {
      if (config.out_of_bounds == OutOfBoundsPolicy::kDrop) {
        ++stream.dropped_out_of_bounds;
        continue;
      }
      throw line_error(IngestErrorKind::kOutOfBounds, line_no,
                       "pixel (" + std::to_string(ev.x) + ", " + std::to_string(ev.y) +
                           ") outside sensor");
    }
    if (config.ordering == OrderingPolicy::kStrict && !stream.events.empty() &&
        ev.t_us < stream.events.back().t_us) {
      throw line_error(IngestErrorKind::kNonMonotonicTimestamp, line_no,
                       "timestamp " + std::to_string(ev.t_us) + " precedes " +
                           std::to_string(stream.events.back().t_us));
    }
    stream.events.push_back(ev);
  }
  if (stream.events.empty()) {
    throw IngestError(IngestErrorKind::kEmptyStream, 0, "event stream contains no events");
  }
  if (config.ordering == OrderingPolicy::kSortStable) {
    std::stable_sort(stream.events.begin(), stream.events.end(),
                     [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
  }
  return stream;
}

EventStream parse_events_file(const std::string& path, const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError(IngestErrorKind::kInvalidConfig, 0, "cannot open event file '" + path + "'");
  }
  return parse_events(in, config);
}

void write_events(std::ostream& sink, const EventStream& stream) {
  for (const auto& ev : stream.events) {
    sink << ev.t_us << ' ' << ev.x << ' ' << ev.y << ' '
         << (ev.polarity == Polarity::kPositive ? 1 : 0) << '\n';
  }
}

ValidationReport validate_stream(const EventStream& stream) {
  ValidationReport report;
  report.count = stream.count();
  report.dropped_out_of_bounds = stream.dropped_out_of_bounds;
  if (stream.empty()) return report;
  report.duration_us = stream.t_last_us() - stream.t_first_us();
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const auto& ev = stream.events[i];
    if (ev.polarity == Polarity::kPositive) {
      ++report.positive;
    } else {
      ++report.negative;
    }
    if (!stream.sensor.contains(ev.x, ev.y)) ++report.out_of_bounds;
    if (i > 0) {
      const auto gap = ev.t_us - stream.events[i - 1].t_us;
      if (gap < 0) report.sorted = false;
      report.max_gap_us = std::max(report.max_gap_us, gap);
    }
  }
  return report;
}

}  // namespace eyelabel
