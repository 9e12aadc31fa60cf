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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eyelabel/error.hpp"
#include "eyelabel/geometry.hpp"

namespace eyelabel {

/// a*x^2 + b*x*y + c*y^2 + d*x + e*y - 1 = 0. Fixing the constant term to -1
/// leaves five free coefficients, so five points determine a conic; the
/// price is that conics through the origin are not representable.
struct Conic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;

  /// Algebraic residual at p (zero on the curve).
  double evaluate(Point2 p) const noexcept {
    return a * p.x * p.x + b * p.x * p.y + c * p.y * p.y + d * p.x + e * p.y - 1.0;
  }
  /// 4ac - b^2; positive for ellipses.
  double discriminant() const noexcept { return 4.0 * a * c - b * b; }

  friend bool operator==(const Conic&, const Conic&) = default;
};

struct EllipseParams {
  Point2 center;
  double major = 0.0;  // semi-axis lengths, major >= minor > 0
  double minor = 0.0;
  double angle = 0.0;  // direction of the major axis from +x towards +y, in [0, pi)
};

struct EllipseFit {
  Conic conic;
  Point2 center;
  double major = 0.0;
  double minor = 0.0;
  double angle = 0.0;
  std::size_t inlier_count = 0;
  double inlier_ratio = 0.0;
  /// Indices into the input point set, ascending.
  std::vector<std::size_t> inliers;
  double mean_inlier_distance = 0.0;
};

struct RansacConfig {
  int iterations = 1000;
  double inlier_tol_px = 2.0;
  double min_inlier_ratio = 0.3;
  std::uint64_t rng_seed = 0;
  /// Plausibility bounds on the fitted semi-axes; candidates outside are
  /// skipped like non-ellipses.
  double min_semi_axis_px = 0.5;
  double max_semi_axis_px = 1e6;
};

enum class EllipseErrorKind {
  kDegenerateSample,
  kNotAnEllipse,
  kDegenerateConic,
  kInsufficientPoints,
  kNoModelFound,
  kInvalidConfig,
};

using EllipseError = TypedError<EllipseErrorKind>;

/// Exact conic through five points (5x5 linear solve).
/// Throws kDegenerateSample when the system is singular, e.g. collinear or
/// repeated points.
Conic fit_conic_5pts(std::span<const Point2, 5> points);
std::optional<Conic> try_fit_conic_5pts(std::span<const Point2, 5> points) noexcept;

/// Least-squares conic for n >= 5 points, minimising the algebraic residual.
std::optional<Conic> fit_conic_least_squares(std::span<const Point2> points) noexcept;

/// Solves [2a b; b 2c] (x, y)^T = (-d, -e)^T. Throws kNotAnEllipse unless
/// 4ac - b^2 > 0.
Point2 conic_center(const Conic& conic);

/// Closed-form geometric parameters. Throws kNotAnEllipse for non-elliptic
/// conics and kDegenerateConic for imaginary or point ellipses.
EllipseParams conic_to_ellipse_params(const Conic& conic);
std::optional<EllipseParams> try_conic_to_ellipse_params(const Conic& conic) noexcept;

/// Inverse of conic_to_ellipse_params, normalised to a constant term of -1.
/// Throws kDegenerateConic when the ellipse passes through the origin.
Conic ellipse_params_to_conic(const EllipseParams& params);

/// First-order (Sampson) approximation of the orthogonal distance from p to
/// the conic: |Q(p)| / |grad Q(p)|.
double sampson_distance(const Conic& conic, Point2 p) noexcept;

/// Robust ellipse fit. Each of config.iterations rounds draws five distinct
/// points from a seeded generator, solves the exact conic, discards
/// non-ellipses, and scores it by inlier count (ties: lower mean distance).
/// The winner is refit by least squares on its inliers and the inlier set is
/// recomputed against the final model.
/// Throws kInsufficientPoints for fewer than five points and kNoModelFound
/// when no admissible ellipse reaches config.min_inlier_ratio.
EllipseFit ransac_fit(std::span<const Point2> points, const RansacConfig& config = {});

}  // namespace eyelabel
