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
#include <map>
#include <memory>
#include <string>

#include "eyelabel/annotation_store.hpp"
#include "eyelabel/event_ingest.hpp"
#include "eyelabel/pipeline.hpp"

namespace eyelabel {

struct SessionManifest {
  std::string recording_id;
  std::int64_t frame_count = 0;
  std::int64_t window_us = kDefaultWindowUs;
  SensorSize sensor{};
  std::uint64_t min_event_threshold = 30;
  std::string annotation_path;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Directory served under /ui/ (the browser bundle); empty disables it.
  std::string ui_dir;
  PipelineConfig pipeline;
  /// When non-empty, corrections rewrite this CSV (and its sidecar) and
  /// append to `audit_path`.
  std::string annotation_path;
  std::string audit_path;
};

/// Transport-independent request/response pair; the HTTP server is a thin
/// adapter over ReviewService::handle().
struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Review backend for one recording.
///
/// Reads run concurrently under a shared lock; PUT and POST requests take the
/// exclusive lock, so each response reflects one consistent snapshot of the
/// store. Every write must carry the record's current revision token.
///
/// Routes:
///   GET  /manifest
///   GET  /frames/{i}.png?overlay=center,roi,ellipse
///   GET  /frames/{i}/events
///   GET  /frames/next?after=&threshold=     GET /frames/prev?before=&threshold=
///   GET  /annotations/{i}                   PUT /annotations/{i}
///   GET  /annotations?from=&to=
///   GET  /deltas
///   GET  /anomalies?threshold=&metric=      POST /anomalies/{id}/dismiss
///   GET  /stats
class ReviewService {
 public:
  ReviewService(EventStream events, AnnotationStore store, RecordingMeta meta, ServiceConfig config);
  ~ReviewService();
  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  SessionManifest manifest() const;
  HttpResponse handle(const HttpRequest& request);

  /// Binds and serves until stop(). Returns false if the port cannot be bound.
  bool listen();
  /// Binds to an ephemeral port and returns it; follow with listen_after_bind().
  int bind_to_any_port();
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

  /// Copy of the current store contents.
  std::vector<FrameAnnotation> snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace eyelabel
