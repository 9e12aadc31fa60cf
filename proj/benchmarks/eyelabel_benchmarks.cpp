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

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eyelabel/frame_accumulator.hpp"
#include "eyelabel/pipeline.hpp"
#include "eyelabel/ransac_ellipse.hpp"
#include "eyelabel/simulation.hpp"
#include "eyelabel/template_matcher.hpp"

namespace {

using namespace eyelabel;

sim::RecordingSpec recording_spec(std::int64_t duration_us) {
  sim::RecordingSpec spec;
  spec.duration_us = duration_us;
  spec.start = {150.0, 120.0};
  for (std::int64_t t = 100000; t + 40000 < duration_us; t += 200000) {
    const double dx = (t / 200000) % 2 == 0 ? 30.0 : 0.0;
    spec.saccades.push_back({t, 40000, {150.0 + dx, 120.0}});
  }
  return spec;
}

void BM_Accumulate(benchmark::State& state) {
  const auto stream = sim::simulate_recording(recording_spec(state.range(0) * 1000));
  for (auto _ : state) {
    std::uint64_t total = 0;
    for_each_frame(stream, kDefaultWindowUs, [&](const PolarityFrame& f) { total += f.total_events; });
    benchmark::DoNotOptimize(total);
  }
  state.counters["events"] = static_cast<double>(stream.count());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.count()));
}
BENCHMARK(BM_Accumulate)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FrameEventCounts(benchmark::State& state) {
  const auto stream = sim::simulate_recording(recording_spec(state.range(0) * 1000));
  for (auto _ : state) benchmark::DoNotOptimize(frame_event_counts(stream));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.count()));
}
BENCHMARK(BM_FrameEventCounts)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_MatchPupil(benchmark::State& state) {
  const auto bank = build_default_templates();
  sim::PupilFrameSpec spec;
  spec.displacement_px = static_cast<double>(state.range(0));
  spec.noise_events = 30;
  const auto frame = sim::simulate_moving_pupil_frame(spec);
  for (auto _ : state) benchmark::DoNotOptimize(match_pupil(frame, bank));
  state.counters["frame_events"] = static_cast<double>(frame.total_events);
}
BENCHMARK(BM_MatchPupil)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_RansacFit(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> phase(0, 2 * std::numbers::pi), ux(0, 346), uy(0, 260);
  std::vector<Point2> pts;
  const double th = std::numbers::pi / 6;
  for (int i = 0; i < 60; ++i) {
    const double p = phase(rng);
    const double u = 20 * std::cos(p), v = 12 * std::sin(p);
    pts.push_back({100 + u * std::cos(th) - v * std::sin(th), 80 + u * std::sin(th) + v * std::cos(th)});
  }
  for (int i = 0; i < 25; ++i) pts.push_back({ux(rng), uy(rng)});
  RansacConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ransac_fit(pts, cfg));
}
BENCHMARK(BM_RansacFit)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Annotate(benchmark::State& state) {
  const auto stream = sim::simulate_recording(recording_spec(1000000));
  PipelineConfig cfg;
  cfg.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(annotate(stream, cfg));
  state.counters["frames"] = static_cast<double>(frame_count(stream));
}
BENCHMARK(BM_Annotate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
