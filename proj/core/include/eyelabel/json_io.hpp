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

#include <nlohmann/json.hpp>

#include "eyelabel/annotation_store.hpp"
#include "eyelabel/anomaly_detector.hpp"
#include "eyelabel/event_ingest.hpp"
#include "eyelabel/frame_accumulator.hpp"
#include "eyelabel/pipeline.hpp"

// JSON projections shared by the HTTP service and the CLI.
namespace eyelabel {

void to_json(nlohmann::json& j, const Point2& p);
void to_json(nlohmann::json& j, const FrameAnnotation& a);
void to_json(nlohmann::json& j, const DeltaEntry& e);
void to_json(nlohmann::json& j, const AnomalyReport& r);
void to_json(nlohmann::json& j, const DatasetStats& s);
void to_json(nlohmann::json& j, const RunReport& r);
void to_json(nlohmann::json& j, const ValidationReport& r);
void to_json(nlohmann::json& j, const AuditEntry& e);

void from_json(const nlohmann::json& j, FrameAnnotation& a);
void from_json(const nlohmann::json& j, DeltaEntry& e);

std::string_view to_string(DeltaMetric m) noexcept;

/// Sparse frame payload: header fields plus "pixels": [[x, y, pos, neg], ...]
/// for every pixel with at least one event, row-major.
nlohmann::json frame_events_json(const PolarityFrame& frame);

}  // namespace eyelabel
