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

#include "eyelabel/review_service.hpp"

#include <httplib.h>

#include <charconv>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <vector>

#include "eyelabel/anomaly_detector.hpp"
#include "eyelabel/frame_accumulator.hpp"
#include "eyelabel/json_io.hpp"
#include "eyelabel/ransac_ellipse.hpp"
#include "eyelabel/template_matcher.hpp"

namespace eyelabel {
namespace {

using nlohmann::json;

HttpResponse json_response(int status, const json& body) {
  return HttpResponse{status, "application/json", body.dump()};
}

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

template <typename T>
std::optional<T> to_number(const std::string& s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

// Thrown by request parsing helpers; mapped to a 4xx response.
struct BadRequest {
  int status;
  std::string message;
};

AnnotationPatch parse_patch(const json& body) {
  AnnotationPatch patch;
  if (body.contains("center")) {
    const auto& c = body.at("center");
    if (c.is_null()) {
      patch.center = std::optional<Point2>{};
    } else if (c.is_object() && c.contains("x") && c.contains("y") && c.at("x").is_number() &&
               c.at("y").is_number()) {
      patch.center = std::optional<Point2>{Point2{c.at("x").get<double>(), c.at("y").get<double>()}};
    } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
      patch.center = std::optional<Point2>{Point2{c[0].get<double>(), c[1].get<double>()}};
    } else {
      throw BadRequest{422, "center must be null, {x, y} or [x, y]"};
    }
  }
  if (body.contains("saccade_state")) {
    const auto& v = body.at("saccade_state");
    const auto s = v.is_string() ? parse_saccade_state(v.get<std::string>()) : std::nullopt;
    if (!s) throw BadRequest{422, "unknown saccade_state"};
    patch.saccade_state = *s;
  }
  if (body.contains("blink_state")) {
    const auto& v = body.at("blink_state");
    const auto s = v.is_string() ? parse_blink_state(v.get<std::string>()) : std::nullopt;
    if (!s) throw BadRequest{422, "unknown blink_state"};
    patch.blink_state = *s;
  }
  return patch;
}

}  // namespace

struct ReviewService::Impl {
  EventStream events;
  AnnotationStore store;
  RecordingMeta meta;
  ServiceConfig config;
  mutable std::shared_mutex mu;
  httplib::Server server;
  std::ofstream audit_out;

  Impl(EventStream ev, AnnotationStore st, RecordingMeta m, ServiceConfig cfg)
      : events(std::move(ev)), store(std::move(st)), meta(std::move(m)), config(std::move(cfg)) {}

  AnomalyConfig anomaly_config(const HttpRequest& req) const {
    AnomalyConfig ac = config.pipeline.anomaly;
    if (const auto it = req.query.find("threshold"); it != req.query.end()) {
      const auto t = to_double(it->second);
      if (!t || !(*t > 0.0)) throw BadRequest{400, "threshold must be a positive number"};
      ac.threshold_px = *t;
    }
    if (const auto it = req.query.find("metric"); it != req.query.end()) {
      if (it->second != "max" && it->second != "euclidean") {
        throw BadRequest{400, "metric must be max or euclidean"};
      }
      ac.metric = it->second == "euclidean" ? DeltaMetric::kEuclidean : DeltaMetric::kPerAxisMax;
    }
    return ac;
  }

  std::int64_t frame_index(const std::string& s) const {
    const auto i = to_number<std::int64_t>(s);
    if (!i || store.find(*i) == nullptr) throw BadRequest{404, "unknown frame '" + s + "'"};
    return *i;
  }

  std::uint64_t threshold_param(const HttpRequest& req) const {
    if (const auto it = req.query.find("threshold"); it != req.query.end()) {
      const auto t = to_number<std::uint64_t>(it->second);
      if (!t) throw BadRequest{400, "threshold must be a non-negative integer"};
      return *t;
    }
    return meta.min_event_threshold;
  }

  json annotation_json(const FrameAnnotation& rec) const {
    json j = rec;
    j["revision"] = store.revision(rec.frame_index);
    return j;
  }

  HttpResponse get_manifest() const {
    const SessionManifest m = manifest();
    return json_response(200, json{{"recording_id", m.recording_id},
                                   {"frame_count", m.frame_count},
                                   {"window_us", m.window_us},
                                   {"sensor_width", m.sensor.width},
                                   {"sensor_height", m.sensor.height},
                                   {"min_event_threshold", m.min_event_threshold},
                                   {"annotation_path", m.annotation_path}});
  }

  SessionManifest manifest() const {
    SessionManifest m;
    m.recording_id = meta.recording_id;
    m.frame_count = static_cast<std::int64_t>(store.size());
    m.window_us = meta.window_us;
    m.sensor = store.sensor();
    m.min_event_threshold = meta.min_event_threshold;
    m.annotation_path = config.annotation_path;
    return m;
  }

  HttpResponse get_frame_png(std::int64_t index, const HttpRequest& req) const {
    const auto frame = frame_at(events, index, meta.window_us);
    RgbImage img = render_rgb(frame);
    std::set<std::string> overlays;
    if (const auto it = req.query.find("overlay"); it != req.query.end()) {
      std::stringstream ss(it->second);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item != "center" && item != "roi" && item != "ellipse") {
          throw BadRequest{400, "unknown overlay '" + item + "'"};
        }
        overlays.insert(item);
      }
    }
    const auto& rec = store.at(index);
    if (rec.center) {
      const auto& tc = config.pipeline.templates;
      const PixelPos pc{static_cast<int>(std::lround(rec.center->x)),
                        static_cast<int>(std::lround(rec.center->y))};
      const RoiBox roi = make_roi(pc, tc.roi_width, tc.roi_height, frame.size);
      if (overlays.contains("roi")) draw_rect(img, roi.x0, roi.y0, roi.width, roi.height, colors::kCyan);
      if (overlays.contains("ellipse")) {
        const auto pts = roi_points(frame, roi);
        RansacConfig rc = config.pipeline.ransac;
        rc.rng_seed = frame_seed(rc.rng_seed, index);
        try {
          if (pts.size() >= 5) {
            const auto fit = ransac_fit(pts, rc);
            draw_ellipse(img, fit.center, fit.major, fit.minor, fit.angle, colors::kBlue);
          }
        } catch (const EllipseError&) {
          // No ellipse to draw for this frame.
        }
      }
      if (overlays.contains("center")) draw_cross(img, *rec.center, 4, colors::kYellow);
    }
    const auto png = encode_png(img);
    return HttpResponse{200, "image/png", std::string(png.begin(), png.end())};
  }

  HttpResponse navigate(bool forward, const HttpRequest& req) const {
    const auto threshold = threshold_param(req);
    const char* key = forward ? "after" : "before";
    std::int64_t from = forward ? -1 : std::numeric_limits<std::int64_t>::max();
    if (const auto it = req.query.find(key); it != req.query.end()) {
      const auto v = to_number<std::int64_t>(it->second);
      if (!v) throw BadRequest{400, std::string(key) + " must be an integer"};
      from = *v;
    }
    const auto recs = store.records();
    if (forward) {
      for (const auto& r : recs) {
        if (r.frame_index > from && r.event_count > threshold) {
          return json_response(200, json{{"frame_index", r.frame_index}});
        }
      }
    } else {
      for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
        if (it->frame_index < from && it->event_count > threshold) {
          return json_response(200, json{{"frame_index", it->frame_index}});
        }
      }
    }
    return error_response(404, "no frame above threshold in that direction");
  }

  HttpResponse list_annotations(const HttpRequest& req) const {
    std::int64_t lo = std::numeric_limits<std::int64_t>::min();
    std::int64_t hi = std::numeric_limits<std::int64_t>::max();
    auto bound = [&](const char* key, std::int64_t& out) {
      if (const auto it = req.query.find(key); it != req.query.end()) {
        const auto v = to_number<std::int64_t>(it->second);
        if (!v) throw BadRequest{400, std::string(key) + " must be an integer"};
        out = *v;
      }
    };
    bound("from", lo);
    bound("to", hi);
    json arr = json::array();
    for (const auto& r : store.records()) {
      if (r.frame_index >= lo && r.frame_index <= hi) arr.push_back(annotation_json(r));
    }
    return json_response(200, json{{"annotations", std::move(arr)}});
  }

  HttpResponse get_anomalies(const HttpRequest& req) const {
    const auto deltas = compute_deltas(store.records());
    const auto report = find_anomalies(deltas, anomaly_config(req));
    json j = report;
    for (auto& a : j.at("anomalies")) {
      const auto id = a.at("frame_index_next").get<std::int64_t>();
      a["id"] = id;
      a["dismissed"] = store.dismissed_anomalies().contains(id);
    }
    return json_response(200, j);
  }

  HttpResponse put_annotation(std::int64_t index, const HttpRequest& req) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      throw BadRequest{422, "body is not valid JSON"};
    }
    if (!body.is_object()) throw BadRequest{422, "body must be a JSON object"};
    if (!body.contains("revision") || !body.at("revision").is_number_unsigned()) {
      throw BadRequest{422, "revision token required"};
    }
    const auto patch = parse_patch(body);
    const auto revision = body.at("revision").get<std::uint64_t>();
    try {
      store.apply_correction(index, patch, revision);
    } catch (const StoreError& e) {
      switch (e.kind()) {
        case StoreErrorKind::kRevisionConflict: {
          json j{{"error", e.what()}, {"current", annotation_json(store.at(index))}};
          return json_response(409, j);
        }
        case StoreErrorKind::kInvalidPatch: throw BadRequest{422, e.what()};
        case StoreErrorKind::kUnknownFrame: throw BadRequest{404, e.what()};
        default: throw;
      }
    }
    persist_records();
    return json_response(200, annotation_json(store.at(index)));
  }

  HttpResponse dismiss(const std::string& id_text) {
    const auto id = to_number<std::int64_t>(id_text);
    if (!id) throw BadRequest{404, "unknown anomaly '" + id_text + "'"};
    const auto deltas = compute_deltas(store.records());
    const bool known = std::any_of(deltas.begin(), deltas.end(),
                                   [&](const DeltaEntry& e) { return e.frame_index_next == *id; });
    if (!known) throw BadRequest{404, "unknown anomaly '" + id_text + "'"};
    const bool changed = store.dismiss_anomaly(*id);
    meta.dismissed_anomalies = store.dismissed_anomalies();
    if (changed && !config.annotation_path.empty()) {
      save_meta_file(meta_path_for(config.annotation_path), meta);
    }
    return json_response(200, json{{"id", *id}, {"dismissed", true}});
  }

  void persist_records() {
    if (config.annotation_path.empty()) return;
    save_annotations_file(config.annotation_path, store.records());
  }

  HttpResponse route(const HttpRequest& req) {
    const auto parts = split_path(req.path);
    const std::size_t n = parts.size();
    const bool get = req.method == "GET";

    if (get) {
      std::shared_lock lock(mu);
      if (n == 1 && parts[0] == "manifest") return get_manifest();
      if (n == 1 && parts[0] == "deltas") {
        return json_response(200, json{{"deltas", compute_deltas(store.records())}});
      }
      if (n == 1 && parts[0] == "anomalies") return get_anomalies(req);
      if (n == 1 && parts[0] == "stats") {
        const auto s = compute_stats(store.records(), meta.min_event_threshold);
        return json_response(200, json{{"user", meta.user},
                                       {"min_event_threshold", meta.min_event_threshold},
                                       {"stats", s}});
      }
      if (n == 1 && parts[0] == "annotations") return list_annotations(req);
      if (n == 2 && parts[0] == "annotations") {
        return json_response(200, annotation_json(store.at(frame_index(parts[1]))));
      }
      if (n == 2 && parts[0] == "frames" && parts[1] == "next") return navigate(true, req);
      if (n == 2 && parts[0] == "frames" && parts[1] == "prev") return navigate(false, req);
      if (n == 2 && parts[0] == "frames" && parts[1].ends_with(".png")) {
        return get_frame_png(frame_index(parts[1].substr(0, parts[1].size() - 4)), req);
      }
      if (n == 3 && parts[0] == "frames" && parts[2] == "events") {
        return json_response(200, frame_events_json(frame_at(events, frame_index(parts[1]), meta.window_us)));
      }
      return error_response(404, "no route for GET " + req.path);
    }
    if (req.method == "PUT" && n == 2 && parts[0] == "annotations") {
      std::unique_lock lock(mu);
      return put_annotation(frame_index(parts[1]), req);
    }
    if (req.method == "POST" && n == 3 && parts[0] == "anomalies" && parts[2] == "dismiss") {
      std::unique_lock lock(mu);
      return dismiss(parts[1]);
    }
    return error_response(405, "method " + req.method + " not allowed on " + req.path);
  }
};

ReviewService::ReviewService(EventStream events, AnnotationStore store, RecordingMeta meta,
                             ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(events), std::move(store), std::move(meta),
                                   std::move(config))) {
  auto& im = *impl_;
  im.store.set_dismissed_anomalies(im.meta.dismissed_anomalies);
  if (!im.config.audit_path.empty()) {
    im.audit_out.open(im.config.audit_path, std::ios::app);
    if (!im.audit_out) throw StoreError(StoreErrorKind::kIo, "cannot open audit log '" + im.config.audit_path + "'");
    im.store.set_audit_sink([&im](const AuditEntry& e) {
      im.audit_out << to_json_line(e) << '\n';
      im.audit_out.flush();
    });
  }

  auto adapter = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    const HttpResponse out = handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  im.server.Get(R"(/(manifest|deltas|anomalies|stats|annotations|frames)(/.*)?)", adapter);
  im.server.Put(R"(/annotations/.*)", adapter);
  im.server.Post(R"(/anomalies/.*)", adapter);
  if (!im.config.ui_dir.empty()) {
    im.server.set_mount_point("/ui", im.config.ui_dir);
    im.server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_redirect("/ui/index.html");
    });
  }
}

ReviewService::~ReviewService() { stop(); }

SessionManifest ReviewService::manifest() const {
  std::shared_lock lock(impl_->mu);
  return impl_->manifest();
}

std::vector<FrameAnnotation> ReviewService::snapshot() const {
  std::shared_lock lock(impl_->mu);
  const auto recs = impl_->store.records();
  return {recs.begin(), recs.end()};
}

HttpResponse ReviewService::handle(const HttpRequest& request) {
  try {
    return impl_->route(request);
  } catch (const BadRequest& e) {
    return error_response(e.status, e.message);
  } catch (const StoreError& e) {
    return error_response(e.kind() == StoreErrorKind::kUnknownFrame ? 404 : 500, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

bool ReviewService::listen() {
  return impl_->server.listen(impl_->config.host, impl_->config.port);
}

int ReviewService::bind_to_any_port() { return impl_->server.bind_to_any_port(impl_->config.host); }

bool ReviewService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ReviewService::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ReviewService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace eyelabel
