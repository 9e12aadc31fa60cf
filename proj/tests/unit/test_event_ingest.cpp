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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "eyelabel/event_ingest.hpp"
#include "oracles.hpp"

namespace eyelabel {
namespace {

EventStream parse(const std::string& text, const IngestConfig& cfg = {}) {
  std::istringstream in(text);
  return parse_events(in, cfg);
}

IngestErrorKind parse_error(const std::string& text, const IngestConfig& cfg = {}) {
  try {
    parse(text, cfg);
  } catch (const IngestError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return IngestErrorKind::kInvalidConfig;
}

TEST(EventIngest, ParsesSingleLine) {
  const auto s = parse("2500 57 112 1\n");
  ASSERT_EQ(s.count(), 1u);
  EXPECT_EQ(s.events[0], (Event{2500, 57, 112, Polarity::kPositive}));
}

TEST(EventIngest, EmptyInputIsEmptyStream) {
  EXPECT_EQ(parse_error(""), IngestErrorKind::kEmptyStream);
  EXPECT_EQ(parse_error("# only a comment\n\n"), IngestErrorKind::kEmptyStream);
}

TEST(EventIngest, PolarityEncodings) {
  const auto s = parse("0 1 1 1\n1 1 1 0\n2 1 1 -1\n");
  EXPECT_EQ(s.events[0].polarity, Polarity::kPositive);
  EXPECT_EQ(s.events[1].polarity, Polarity::kNegative);
  EXPECT_EQ(s.events[2].polarity, Polarity::kNegative);
  EXPECT_EQ(parse_error("0 1 1 2\n"), IngestErrorKind::kMalformedLine);
}

TEST(EventIngest, MalformedLinesReportLineNumber) {
  try {
    parse("0 1 1 1\n# c\n5 1 x 1\n");
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.kind(), IngestErrorKind::kMalformedLine);
    EXPECT_EQ(e.line_no(), 3u);
  }
  EXPECT_EQ(parse_error("1 2 3\n"), IngestErrorKind::kMalformedLine);
  EXPECT_EQ(parse_error("-5 2 3 1\n"), IngestErrorKind::kMalformedLine);
}

TEST(EventIngest, OrderingPolicy) {
  EXPECT_EQ(parse_error("10 1 1 1\n5 1 1 1\n"), IngestErrorKind::kNonMonotonicTimestamp);
  IngestConfig cfg;
  cfg.ordering = OrderingPolicy::kSortStable;
  const auto s = parse("10 1 1 1\n5 2 2 0\n10 3 3 0\n", cfg);
  ASSERT_EQ(s.count(), 3u);
  EXPECT_EQ(s.events[0].t_us, 5);
  EXPECT_EQ(s.events[1].x, 1);
  EXPECT_EQ(s.events[2].x, 3);
}

TEST(EventIngest, OutOfBoundsPolicy) {
  EXPECT_EQ(parse_error("0 346 0 1\n"), IngestErrorKind::kOutOfBounds);
  EXPECT_EQ(parse_error("0 0 260 1\n"), IngestErrorKind::kOutOfBounds);
  IngestConfig cfg;
  cfg.out_of_bounds = OutOfBoundsPolicy::kDrop;
  const auto s = parse("0 346 0 1\n1 345 259 1\n", cfg);
  EXPECT_EQ(s.count(), 1u);
  EXPECT_EQ(s.dropped_out_of_bounds, 1u);
}

TEST(EventIngest, ColumnOrderDelimiterAndUnits) {
  IngestConfig cfg;
  cfg.set_column_order("x,y,p,t");
  cfg.delimiter = ',';
  cfg.time_unit = TimeUnit::kMilliseconds;
  const auto s = parse("57, 112, 1, 2.5\n", cfg);
  EXPECT_EQ(s.events[0], (Event{2500, 57, 112, Polarity::kPositive}));
  EXPECT_EQ(cfg.column_order(), "x,y,p,t");

  IngestConfig sec;
  sec.time_unit = parse_time_unit("s");
  EXPECT_EQ(parse("0.0025 57 112 0\n", sec).events[0].t_us, 2500);
  IngestConfig ns;
  ns.time_unit = TimeUnit::kNanoseconds;
  EXPECT_EQ(parse("2500000 57 112 0\n", ns).events[0].t_us, 2500);
  EXPECT_THROW(parse_time_unit("fortnight"), IngestError);
}

TEST(EventIngest, ApplyKeyValues) {
  IngestConfig cfg;
  cfg.apply({{"columns", "t x y p"}, {"width", "640"}, {"height", "480"},
             {"out_of_bounds", "drop"}, {"ordering", "sort"}, {"unrelated", "1"}});
  EXPECT_EQ(cfg.sensor.width, 640);
  EXPECT_EQ(cfg.sensor.height, 480);
  EXPECT_EQ(cfg.out_of_bounds, OutOfBoundsPolicy::kDrop);
  EXPECT_EQ(cfg.ordering, OrderingPolicy::kSortStable);
  EXPECT_THROW(cfg.apply({{"ordering", "sideways"}}), IngestError);
}

TEST(EventIngest, ThousandSyntheticEvents) {
  std::mt19937_64 rng(11);
  const auto gen = oracle::random_stream(rng, 1000, 200000);
  std::stringstream ss;
  write_events(ss, gen);
  const auto s = parse_events(ss);
  EXPECT_EQ(s.count(), 1000u);
  EXPECT_TRUE(std::is_sorted(s.events.begin(), s.events.end(),
                             [](const Event& a, const Event& b) { return a.t_us < b.t_us; }));
}

TEST(EventIngest, RoundTripProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gen = oracle::random_stream(rng, 1 + rng() % 500, 1000000);
    std::stringstream ss;
    write_events(ss, gen);
    EXPECT_EQ(parse_events(ss).events, gen.events);
  }
}

TEST(EventIngest, ConcatenationProperty) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = oracle::random_stream(rng, 1 + rng() % 200, 100000);
    auto b = oracle::random_stream(rng, 1 + rng() % 200, 100000);
    for (auto& e : b.events) e.t_us += a.t_last_us();
    std::stringstream sa, sb;
    write_events(sa, a);
    write_events(sb, b);
    std::stringstream joined(sa.str() + sb.str());
    const auto s = parse_events(joined);
    std::vector<Event> expect = a.events;
    expect.insert(expect.end(), b.events.begin(), b.events.end());
    EXPECT_EQ(s.events, expect);
  }
}

TEST(EventIngest, ValidationReportCounts) {
  const auto s = parse("0 1 1 1\n10 2 2 1\n40 3 3 0\n");
  const auto r = validate_stream(s);
  EXPECT_EQ(r.count, 3u);
  EXPECT_EQ(r.positive, 2u);
  EXPECT_EQ(r.negative, 1u);
  EXPECT_EQ(r.duration_us, 40);
  EXPECT_EQ(r.max_gap_us, 30);
  EXPECT_TRUE(r.sorted);
}

TEST(EventIngest, SingleEventHasZeroDuration) {
  EXPECT_EQ(validate_stream(parse("777 1 1 0\n")).duration_us, 0);
}

TEST(EventIngest, ValidationMatchesGeneratorTallies) {
  std::mt19937_64 rng(21);
  const auto gen = oracle::random_stream(rng, 10000, 5000000);
  std::size_t pos = 0;
  for (const auto& e : gen.events) pos += e.polarity == Polarity::kPositive ? 1 : 0;
  const auto r = validate_stream(gen);
  EXPECT_EQ(r.count, 10000u);
  EXPECT_EQ(r.positive, pos);
  EXPECT_EQ(r.negative, 10000u - pos);
  EXPECT_EQ(r.out_of_bounds, 0u);
}

}  // namespace
}  // namespace eyelabel
