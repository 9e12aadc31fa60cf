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

// eyelabel: semi-automatic pupil annotation for event-camera recordings.
//
//   eyelabel validate  --events rec.txt
//   eyelabel render    --events rec.txt --frame 120 --out f120.png
//   eyelabel annotate  --events rec.txt --out rec.csv
//   eyelabel stats     user4.csv user5.csv ...
//   eyelabel anomalies --annotations rec.csv --threshold 10 --plot deltas.png
//   eyelabel serve     --events rec.txt --annotations rec.csv --port 8080
//   eyelabel simulate  --out rec.txt --saccades 3

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eyelabel/annotation_store.hpp"
#include "eyelabel/anomaly_detector.hpp"
#include "eyelabel/event_ingest.hpp"
#include "eyelabel/frame_accumulator.hpp"
#include "eyelabel/json_io.hpp"
#include "eyelabel/pipeline.hpp"
#include "eyelabel/review_service.hpp"
#include "eyelabel/simulation.hpp"
#include "eyelabel/template_matcher.hpp"

namespace {

using eyelabel::PipelineConfig;
using nlohmann::json;

// Flags land here first; a --config file is applied on top afterwards.
struct Options {
  std::map<std::string, std::string> kv;
  std::string config_path;
};

void add_option(CLI::App* cmd, Options& opts, const std::string& flag, const std::string& key,
                const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&opts, key](const std::string& v) { opts.kv[key] = v; }, help);
}

void add_ingest_options(CLI::App* cmd, Options& opts) {
  add_option(cmd, opts, "--columns", "columns", "Column order, e.g. t,x,y,p");
  add_option(cmd, opts, "--delimiter", "delimiter", "Column delimiter (default: whitespace)");
  add_option(cmd, opts, "--time-unit", "time_unit", "Timestamp unit: ns, us, ms or s");
  add_option(cmd, opts, "--width", "width", "Sensor width in pixels (default 346)");
  add_option(cmd, opts, "--height", "height", "Sensor height in pixels (default 260)");
  cmd->add_flag_callback("--sort", [&opts] { opts.kv["ordering"] = "sort"; },
                         "Accept unsorted input and sort it stably");
  cmd->add_flag_callback("--drop-oob", [&opts] { opts.kv["out_of_bounds"] = "drop"; },
                         "Drop out-of-bounds events instead of failing");
  add_option(cmd, opts, "--window-us", "window_us", "Frame duration in microseconds (default 5000)");
  cmd->add_option("--config", opts.config_path, "key = value file; overrides flags");
}

void add_pipeline_options(CLI::App* cmd, Options& opts) {
  add_option(cmd, opts, "--saccade-threshold", "saccade_threshold",
             "A frame is a saccade when it holds more events than this (default 150)");
  add_option(cmd, opts, "--pupil-radius", "pupil_radius", "Template pupil radius in px (default 10)");
  add_option(cmd, opts, "--kernel-size", "kernel_size", "Odd template size in px (default 31)");
  add_option(cmd, opts, "--roi", "roi_width", "ROI edge length in px (default 64)");
  add_option(cmd, opts, "--min-score", "min_score", "Minimum template peak (default 0.02)");
  add_option(cmd, opts, "--ransac-iters", "ransac_iters", "RANSAC iterations (default 1000)");
  add_option(cmd, opts, "--inlier-tol", "inlier_tol", "RANSAC inlier tolerance in px (default 2)");
  add_option(cmd, opts, "--ransac-seed", "ransac_seed", "RANSAC base seed (default 0)");
  add_option(cmd, opts, "--min-event-threshold", "min_event_threshold",
             "Per-recording review threshold (default 30)");
  add_option(cmd, opts, "--jobs", "jobs", "Worker threads (default 1)");
}

PipelineConfig resolve(Options& opts) {
  PipelineConfig cfg;
  auto kv = opts.kv;
  if (kv.contains("roi_width")) kv["roi_height"] = kv["roi_width"];
  if (!opts.config_path.empty()) {
    for (const auto& [k, v] : eyelabel::load_key_value_file(opts.config_path)) kv[k] = v;
  }
  cfg.apply(kv);
  cfg.validate();
  return cfg;
}

eyelabel::EventStream load_events(const std::string& path, const PipelineConfig& cfg) {
  return eyelabel::parse_events_file(path, cfg.ingest);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int cmd_validate(const std::string& events_path, Options& opts) {
  const auto cfg = resolve(opts);
  const auto stream = load_events(events_path, cfg);
  json j = eyelabel::validate_stream(stream);
  j["frames"] = eyelabel::frame_count(stream, cfg.window_us);
  j["sensor_width"] = stream.sensor.width;
  j["sensor_height"] = stream.sensor.height;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_render(const std::string& events_path, std::int64_t frame_index, const std::string& out,
               const std::string& csv, const std::string& heatmap_dir, Options& opts) {
  const auto cfg = resolve(opts);
  const auto stream = load_events(events_path, cfg);
  const auto frame = eyelabel::frame_at(stream, frame_index, cfg.window_us);
  eyelabel::write_png(out, eyelabel::render_rgb(frame));
  if (!csv.empty()) {
    std::ofstream f(csv);
    eyelabel::write_frame_csv(f, frame);
  }
  if (!heatmap_dir.empty()) {
    std::filesystem::create_directories(heatmap_dir);
    const auto bank = eyelabel::build_default_templates(cfg.templates);
    for (const auto d : eyelabel::kAllDirections) {
      const auto heat = eyelabel::direction_heatmap(frame, bank, d);
      const auto path = std::filesystem::path(heatmap_dir) /
                        ("heatmap_" + std::to_string(frame_index) + "_" +
                         std::string(eyelabel::to_string(d)) + ".png");
      eyelabel::write_png(path.string(), eyelabel::render_heatmap(heat, frame.size));
    }
  }
  std::cerr << "frame " << frame_index << ": " << frame.total_events << " events -> " << out << '\n';
  return 0;
}

int cmd_annotate(const std::string& events_path, const std::string& out, const std::string& report_path,
                 const std::string& user, const std::string& recording_id, Options& opts) {
  const auto cfg = resolve(opts);
  const auto stream = load_events(events_path, cfg);
  const auto run = eyelabel::annotate(stream, cfg);
  eyelabel::save_annotations_file(out, run.annotations);

  eyelabel::RecordingMeta meta;
  meta.recording_id = recording_id.empty() ? std::filesystem::path(events_path).stem().string() : recording_id;
  meta.user = user.empty() ? meta.recording_id : user;
  meta.min_event_threshold = cfg.min_event_threshold;
  meta.window_us = cfg.window_us;
  meta.sensor = stream.sensor;
  eyelabel::save_meta_file(eyelabel::meta_path_for(out), meta);

  const json report = run.report;
  if (!report_path.empty()) write_text(report_path, report.dump(2) + "\n");
  std::cerr << "frames " << run.report.frames << ", active " << run.report.active_frames
            << ", saccades " << run.report.saccade_count << ", centers " << run.report.centers
            << ", no-signal " << run.report.no_signal << ", fit failures "
            << run.report.fit_failures << " -> " << out << '\n';
  return 0;
}

int cmd_stats(const std::vector<std::string>& files, std::optional<std::uint64_t> threshold,
              const std::string& json_out) {
  std::vector<eyelabel::UserStats> users;
  for (const auto& path : files) {
    const auto records = eyelabel::load_annotations_file(path);
    eyelabel::RecordingMeta meta;
    meta.user = std::filesystem::path(path).stem().string();
    if (std::filesystem::exists(eyelabel::meta_path_for(path))) {
      meta = eyelabel::load_meta_file(eyelabel::meta_path_for(path));
      if (meta.user.empty()) meta.user = std::filesystem::path(path).stem().string();
    }
    const auto thr = threshold.value_or(meta.min_event_threshold);
    users.push_back({meta.user, eyelabel::compute_stats(records, thr)});
  }
  std::cout << eyelabel::format_stats_table(users);
  if (!json_out.empty()) {
    json j;
    eyelabel::DatasetStats total;
    j["users"] = json::array();
    for (const auto& u : users) {
      j["users"].push_back(json{{"user", u.user}, {"stats", u.stats}});
      total += u.stats;
    }
    j["total"] = total;
    write_text(json_out, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_anomalies(const std::string& annotations, double threshold, const std::string& metric,
                  bool no_gap_scaling, const std::string& out, const std::string& plot) {
  const auto records = eyelabel::load_annotations_file(annotations);
  eyelabel::AnomalyConfig ac;
  ac.threshold_px = threshold;
  ac.metric = metric == "euclidean" ? eyelabel::DeltaMetric::kEuclidean : eyelabel::DeltaMetric::kPerAxisMax;
  ac.scale_by_gap = !no_gap_scaling;
  const auto deltas = eyelabel::compute_deltas(records);
  const auto report = eyelabel::find_anomalies(deltas, ac);
  const json j = report;
  write_text(out, j.dump(2) + "\n");
  if (!plot.empty()) eyelabel::write_png(plot, eyelabel::render_anomaly_plot(records, deltas, report));
  std::cerr << report.anomalies.size() << " of " << deltas.size() << " deltas exceed "
            << threshold << " px\n";
  return 0;
}

int cmd_serve(const std::string& events_path, const std::string& annotations, std::string audit,
              const std::string& host, int port, const std::string& ui_dir, Options& opts) {
  auto cfg = resolve(opts);
  eyelabel::RecordingMeta meta;
  meta.recording_id = std::filesystem::path(annotations).stem().string();
  if (std::filesystem::exists(eyelabel::meta_path_for(annotations))) {
    meta = eyelabel::load_meta_file(eyelabel::meta_path_for(annotations));
    cfg.window_us = meta.window_us;
    cfg.ingest.sensor = meta.sensor;
  } else {
    meta.window_us = cfg.window_us;
    meta.sensor = cfg.ingest.sensor;
    meta.min_event_threshold = cfg.min_event_threshold;
  }
  auto stream = load_events(events_path, cfg);
  eyelabel::AnnotationStore store(eyelabel::load_annotations_file(annotations), stream.sensor);
  eyelabel::ServiceConfig sc;
  sc.host = host;
  sc.port = port;
  sc.ui_dir = ui_dir;
  sc.pipeline = cfg;
  sc.annotation_path = annotations;
  sc.audit_path = audit.empty() ? annotations + ".audit.jsonl" : audit;
  eyelabel::ReviewService service(std::move(stream), std::move(store), std::move(meta), sc);
  std::cerr << "serving " << annotations << " on http://" << host << ":" << port << '\n';
  if (!service.listen()) {
    std::cerr << "error: cannot listen on " << host << ":" << port << '\n';
    return 1;
  }
  return 0;
}

int cmd_simulate(const std::string& out, int saccades, std::int64_t duration_ms, double noise_rate,
                 std::uint64_t seed) {
  eyelabel::sim::RecordingSpec spec;
  spec.duration_us = duration_ms * 1000;
  spec.noise_rate_hz = noise_rate;
  spec.seed = seed;
  // Alternate left/right 40 px saccades lasting 40 ms, evenly spaced.
  const std::int64_t slot = spec.duration_us / (saccades + 1);
  for (int i = 0; i < saccades; ++i) {
    const double x = (i % 2 == 0) ? spec.start.x + 40.0 : spec.start.x;
    spec.saccades.push_back({slot * (i + 1), 40000, {x, spec.start.y + (i % 3 - 1) * 10.0}});
  }
  const auto stream = eyelabel::sim::simulate_recording(spec);
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write '" + out + "'");
  eyelabel::write_events(f, stream);
  std::cerr << stream.count() << " events, " << saccades << " saccades -> " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-automatic pupil annotation for event-camera eye recordings"};
  app.require_subcommand(1);
  Options opts;
  int status = 0;

  std::string events;
  auto* validate = app.add_subcommand("validate", "Parse an event file and report its statistics");
  validate->add_option("--events", events, "Event text file")->required();
  add_ingest_options(validate, opts);
  validate->callback([&] { status = cmd_validate(events, opts); });

  std::int64_t frame = 0;
  std::string render_out = "frame.png", render_csv, heatmaps;
  auto* render = app.add_subcommand("render", "Render one polarity frame as PNG");
  render->add_option("--events", events, "Event text file")->required();
  render->add_option("--frame", frame, "Frame index")->required();
  render->add_option("--out", render_out, "PNG path");
  render->add_option("--csv", render_csv, "Also write the sparse x,y,pos,neg CSV");
  render->add_option("--heatmaps", heatmaps, "Directory for per-direction template heatmaps");
  add_ingest_options(render, opts);
  add_pipeline_options(render, opts);
  render->callback([&] { status = cmd_render(events, frame, render_out, render_csv, heatmaps, opts); });

  std::string annotate_out, report_out, user, recording_id;
  auto* annotate = app.add_subcommand("annotate", "Run the automatic annotation pipeline");
  annotate->add_option("--events", events, "Event text file")->required();
  annotate->add_option("--out", annotate_out, "Annotation CSV")->required();
  annotate->add_option("--report", report_out, "Run report JSON ('-' for stdout)");
  annotate->add_option("--user", user, "User label stored in the sidecar");
  annotate->add_option("--recording-id", recording_id, "Recording id stored in the sidecar");
  add_ingest_options(annotate, opts);
  add_pipeline_options(annotate, opts);
  annotate->callback([&] {
    status = cmd_annotate(events, annotate_out, report_out, user, recording_id, opts);
  });

  std::vector<std::string> stat_files;
  std::optional<std::uint64_t> stat_threshold;
  std::string stats_json;
  auto* stats = app.add_subcommand("stats", "Per-user dataset statistics and totals");
  stats->add_option("annotations", stat_files, "Annotation CSV files, one per user")->required();
  stats->add_option("--min-event-threshold", stat_threshold,
                    "Override the per-recording threshold from the sidecars");
  stats->add_option("--json", stats_json, "Also write machine-readable stats ('-' for stdout)");
  stats->callback([&] { status = cmd_stats(stat_files, stat_threshold, stats_json); });

  std::string anomalies_in, anomalies_out = "-", plot, metric = "max";
  double threshold = 10.0;
  bool no_gap = false;
  auto* anomalies = app.add_subcommand("anomalies", "Flag implausible center displacements");
  anomalies->add_option("--annotations", anomalies_in, "Annotation CSV")->required();
  anomalies->add_option("--threshold", threshold, "Per-step displacement limit in px")
      ->check(CLI::PositiveNumber);
  anomalies->add_option("--metric", metric, "max (per axis) or euclidean")
      ->check(CLI::IsMember({"max", "euclidean"}));
  anomalies->add_flag("--no-gap-scaling", no_gap, "Do not scale the limit by the frame gap");
  anomalies->add_option("--out", anomalies_out, "Report JSON ('-' for stdout)");
  anomalies->add_option("--plot", plot, "Delta plot PNG");
  anomalies->callback([&] {
    status = cmd_anomalies(anomalies_in, threshold, metric, no_gap, anomalies_out, plot);
  });

  std::string serve_annotations, audit, host = "127.0.0.1", ui_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the review API for one recording");
  serve->add_option("--events", events, "Event text file")->required();
  serve->add_option("--annotations", serve_annotations, "Annotation CSV")->required();
  serve->add_option("--audit", audit, "Audit log (default <annotations>.audit.jsonl)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--ui-dir", ui_dir, "Review UI bundle served under /ui/");
  add_ingest_options(serve, opts);
  add_pipeline_options(serve, opts);
  serve->callback([&] {
    status = cmd_serve(events, serve_annotations, audit, host, port, ui_dir, opts);
  });

  std::string sim_out;
  int sim_saccades = 3;
  std::int64_t sim_duration_ms = 1000;
  double sim_noise = 1000.0;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic recording with scripted saccades");
  simulate->add_option("--out", sim_out, "Event text file")->required();
  simulate->add_option("--saccades", sim_saccades, "Number of saccades")->check(CLI::NonNegativeNumber);
  simulate->add_option("--duration-ms", sim_duration_ms, "Recording length")->check(CLI::PositiveNumber);
  simulate->add_option("--noise-rate", sim_noise, "Background events per second");
  simulate->add_option("--seed", sim_seed, "Generator seed");
  simulate->callback([&] {
    status = cmd_simulate(sim_out, sim_saccades, sim_duration_ms, sim_noise, sim_seed);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
