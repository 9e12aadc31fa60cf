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

#include "eyelabel/ransac_ellipse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace eyelabel {
namespace {

// Coordinates are divided by this before solving so that the quadratic and
// linear columns have comparable magnitude.
double coordinate_scale(std::span<const Point2> points) {
  double s = 0.0;
  for (const auto& p : points) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return s > 0.0 ? s : 1.0;
}

Conic unscale(const Eigen::Matrix<double, 5, 1>& theta, double s) {
  return Conic{theta(0) / (s * s), theta(1) / (s * s), theta(2) / (s * s), theta(3) / s,
               theta(4) / s};
}

bool all_finite(const Conic& q) {
  return std::isfinite(q.a) && std::isfinite(q.b) && std::isfinite(q.c) && std::isfinite(q.d) &&
         std::isfinite(q.e);
}

bool axes_admissible(const EllipseParams& p, const RansacConfig& config) {
  return p.minor >= config.min_semi_axis_px && p.major <= config.max_semi_axis_px;
}

struct Score {
  std::size_t count = 0;
  double mean_distance = std::numeric_limits<double>::infinity();
};

Score score(const Conic& conic, std::span<const Point2> points, double tol,
            std::vector<std::size_t>* inliers = nullptr) {
  Score s;
  double sum = 0.0;
  if (inliers != nullptr) inliers->clear();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dist = sampson_distance(conic, points[i]);
    if (dist <= tol) {
      ++s.count;
      sum += dist;
      if (inliers != nullptr) inliers->push_back(i);
    }
  }
  if (s.count > 0) s.mean_distance = sum / static_cast<double>(s.count);
  return s;
}

bool better(const Score& lhs, const Score& rhs) {
  return lhs.count > rhs.count || (lhs.count == rhs.count && lhs.mean_distance < rhs.mean_distance);
}

}  // namespace

std::optional<Conic> try_fit_conic_5pts(std::span<const Point2, 5> points) noexcept {
  const double s = coordinate_scale(points);
  Eigen::Matrix<double, 5, 5> m;
  for (int i = 0; i < 5; ++i) {
    const double x = points[static_cast<std::size_t>(i)].x / s;
    const double y = points[static_cast<std::size_t>(i)].y / s;
    m.row(i) << x * x, x * y, y * y, x, y;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(m);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::Matrix<double, 5, 1> theta = lu.solve(Eigen::Matrix<double, 5, 1>::Ones());
  Conic q = unscale(theta, s);
  if (!all_finite(q)) return std::nullopt;
  return q;
}

Conic fit_conic_5pts(std::span<const Point2, 5> points) {
  if (auto q = try_fit_conic_5pts(points)) return *q;
  throw EllipseError(EllipseErrorKind::kDegenerateSample,
                     "five-point conic system is singular (collinear or repeated points?)");
}

std::optional<Conic> fit_conic_least_squares(std::span<const Point2> points) noexcept {
  if (points.size() < 5) return std::nullopt;
  const double s = coordinate_scale(points);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), 5);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i].x / s;
    const double y = points[i].y / s;
    m.row(static_cast<Eigen::Index>(i)) << x * x, x * y, y * y, x, y;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  if (qr.rank() < 5) return std::nullopt;
  const Eigen::Matrix<double, 5, 1> theta =
      qr.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(points.size())));
  Conic q = unscale(theta, s);
  if (!all_finite(q)) return std::nullopt;
  return q;
}

Point2 conic_center(const Conic& q) {
  const double det = q.discriminant();
  if (!(det > 0.0)) {
    throw EllipseError(EllipseErrorKind::kNotAnEllipse,
                       "conic is not an ellipse (4ac - b^2 = " + std::to_string(det) + ")");
  }
  return {(q.b * q.e - 2.0 * q.c * q.d) / det, (q.b * q.d - 2.0 * q.a * q.e) / det};
}

std::optional<EllipseParams> try_conic_to_ellipse_params(const Conic& q) noexcept {
  if (!(q.discriminant() > 0.0) || !all_finite(q)) return std::nullopt;
  const double det = q.discriminant();
  const Point2 center{(q.b * q.e - 2.0 * q.c * q.d) / det, (q.b * q.d - 2.0 * q.a * q.e) / det};
  // Constant term after translating the origin to the center.
  const double f0 = 0.5 * (q.d * center.x + q.e * center.y) - 1.0;
  const double mean = 0.5 * (q.a + q.c);
  const double radius = std::hypot(0.5 * (q.a - q.c), 0.5 * q.b);
  const double lambda_plus = mean + radius;
  const double lambda_minus = mean - radius;
  const double sq_plus = -f0 / lambda_plus;
  const double sq_minus = -f0 / lambda_minus;
  if (!(sq_plus > 0.0) || !(sq_minus > 0.0) || !std::isfinite(sq_plus) ||
      !std::isfinite(sq_minus)) {
    return std::nullopt;
  }
  const double axis_plus = std::sqrt(sq_plus);
  const double axis_minus = std::sqrt(sq_minus);
  // Eigenvector of lambda_plus.
  const double phi = 0.5 * std::atan2(q.b, q.a - q.c);

  EllipseParams p;
  p.center = center;
  double angle = 0.0;
  if (axis_plus >= axis_minus) {
    p.major = axis_plus;
    p.minor = axis_minus;
    angle = phi;
  } else {
    p.major = axis_minus;
    p.minor = axis_plus;
    angle = phi + 0.5 * std::numbers::pi;
  }
  if (p.major - p.minor <= 1e-12 * p.major) {
    angle = 0.0;
  } else {
    angle = std::fmod(angle, std::numbers::pi);
    if (angle < 0.0) angle += std::numbers::pi;
    if (angle >= std::numbers::pi) angle -= std::numbers::pi;
  }
  p.angle = angle;
  return p;
}

EllipseParams conic_to_ellipse_params(const Conic& q) {
  if (!(q.discriminant() > 0.0)) {
    throw EllipseError(EllipseErrorKind::kNotAnEllipse, "conic is not an ellipse");
  }
  if (auto p = try_conic_to_ellipse_params(q)) return *p;
  throw EllipseError(EllipseErrorKind::kDegenerateConic,
                     "ellipse is imaginary or collapses to a point");
}

Conic ellipse_params_to_conic(const EllipseParams& p) {
  if (!(p.major > 0.0) || !(p.minor > 0.0)) {
    throw EllipseError(EllipseErrorKind::kDegenerateConic, "semi-axes must be positive");
  }
  const double ct = std::cos(p.angle);
  const double st = std::sin(p.angle);
  const double ia = 1.0 / (p.major * p.major);
  const double ib = 1.0 / (p.minor * p.minor);
  const double a = ct * ct * ia + st * st * ib;
  const double b = 2.0 * ct * st * (ia - ib);
  const double c = st * st * ia + ct * ct * ib;
  const double x0 = p.center.x;
  const double y0 = p.center.y;
  const double d = -2.0 * a * x0 - b * y0;
  const double e = -b * x0 - 2.0 * c * y0;
  const double f = a * x0 * x0 + b * x0 * y0 + c * y0 * y0 - 1.0;
  if (std::abs(f) < 1e-12) {
    throw EllipseError(EllipseErrorKind::kDegenerateConic,
                       "ellipse passes through the origin; constant term cannot be -1");
  }
  const double k = -1.0 / f;
  return Conic{a * k, b * k, c * k, d * k, e * k};
}

double sampson_distance(const Conic& q, Point2 p) noexcept {
  const double gx = 2.0 * q.a * p.x + q.b * p.y + q.d;
  const double gy = q.b * p.x + 2.0 * q.c * p.y + q.e;
  const double g = std::hypot(gx, gy);
  const double r = std::abs(q.evaluate(p));
  if (g == 0.0) return r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return r / g;
}

EllipseFit ransac_fit(std::span<const Point2> points, const RansacConfig& config) {
  if (config.iterations < 1 || !(config.inlier_tol_px > 0.0) || config.min_inlier_ratio < 0.0 ||
      config.min_inlier_ratio > 1.0) {
    throw EllipseError(EllipseErrorKind::kInvalidConfig, "invalid RANSAC configuration");
  }
  if (points.size() < 5) {
    throw EllipseError(EllipseErrorKind::kInsufficientPoints,
                       "RANSAC needs at least 5 points, got " + std::to_string(points.size()));
  }

  std::mt19937_64 rng(config.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  std::optional<Conic> best;
  Score best_score;
  std::array<std::size_t, 5> idx{};
  std::array<Point2, 5> sample{};

  for (int it = 0; it < config.iterations; ++it) {
    for (std::size_t k = 0; k < 5; ++k) {
      std::size_t candidate = 0;
      do {
        candidate = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), candidate) !=
               idx.begin() + static_cast<std::ptrdiff_t>(k));
      idx[k] = candidate;
      sample[k] = points[candidate];
    }
    const auto conic = try_fit_conic_5pts(sample);
    if (!conic) continue;
    const auto params = try_conic_to_ellipse_params(*conic);
    if (!params || !axes_admissible(*params, config)) continue;
    const Score s = score(*conic, points, config.inlier_tol_px);
    if (better(s, best_score)) {
      best = conic;
      best_score = s;
    }
  }
  if (!best) {
    throw EllipseError(EllipseErrorKind::kNoModelFound, "no admissible ellipse hypothesis");
  }

  std::vector<std::size_t> inliers;
  score(*best, points, config.inlier_tol_px, &inliers);
  Conic final_conic = *best;
  {
    std::vector<Point2> support;
    support.reserve(inliers.size());
    for (const auto i : inliers) support.push_back(points[i]);
    if (const auto refit = fit_conic_least_squares(support)) {
      const auto params = try_conic_to_ellipse_params(*refit);
      if (params && axes_admissible(*params, config)) {
        const Score s = score(*refit, points, config.inlier_tol_px);
        if (s.count >= best_score.count) final_conic = *refit;
      }
    }
  }

  EllipseFit fit;
  const Score final_score = score(final_conic, points, config.inlier_tol_px, &fit.inliers);
  const EllipseParams params = conic_to_ellipse_params(final_conic);
  fit.conic = final_conic;
  fit.center = params.center;
  fit.major = params.major;
  fit.minor = params.minor;
  fit.angle = params.angle;
  fit.inlier_count = final_score.count;
  fit.inlier_ratio = static_cast<double>(final_score.count) / static_cast<double>(points.size());
  fit.mean_inlier_distance = final_score.count > 0 ? final_score.mean_distance : 0.0;
  if (fit.inlier_ratio < config.min_inlier_ratio) {
    throw EllipseError(EllipseErrorKind::kNoModelFound,
                       "best ellipse explains only " + std::to_string(fit.inlier_count) + " of " +
                           std::to_string(points.size()) + " points");
  }
  return fit;
}

}  // namespace eyelabel
