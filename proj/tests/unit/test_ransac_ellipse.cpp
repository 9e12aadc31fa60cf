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

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "eyelabel/ransac_ellipse.hpp"
#include "oracles.hpp"

namespace eyelabel {
namespace {

constexpr double kPi = std::numbers::pi;

template <typename F>
EllipseErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const EllipseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected EllipseError";
  return EllipseErrorKind::kInvalidConfig;
}

std::array<Point2, 5> five_on(Point2 c, double a, double b, double th, double phase = 0.3) {
  std::array<Point2, 5> p;
  for (int i = 0; i < 5; ++i) p[i] = oracle::ellipse_point(c, a, b, th, phase + i * 2 * kPi / 5);
  return p;
}

std::vector<Point2> ring(Point2 c, double a, double b, double th, int n) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(oracle::ellipse_point(c, a, b, th, 2 * kPi * i / n));
  return pts;
}

TEST(Conic, UnitCircle) {
  const std::array<Point2, 5> p{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {std::sqrt(0.5), std::sqrt(0.5)}}};
  const auto q = fit_conic_5pts(p);
  EXPECT_NEAR(q.a, 1.0, 1e-12);
  EXPECT_NEAR(q.b, 0.0, 1e-12);
  EXPECT_NEAR(q.c, 1.0, 1e-12);
  EXPECT_NEAR(q.d, 0.0, 1e-12);
  EXPECT_NEAR(q.e, 0.0, 1e-12);
  const auto c = conic_center(q);
  EXPECT_NEAR(c.x, 0.0, 1e-12);
  EXPECT_NEAR(c.y, 0.0, 1e-12);
}

TEST(Conic, CollinearIsDegenerate) {
  const std::array<Point2, 5> p{{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}}};
  EXPECT_EQ(error_of([&] { fit_conic_5pts(p); }), EllipseErrorKind::kDegenerateSample);
  EXPECT_FALSE(try_fit_conic_5pts(p).has_value());
}

TEST(Conic, ReferenceEllipseCoefficients) {
  // Oracle values for center (100, 80), semi-axes (20, 12), rotation 30 degrees.
  const auto q = fit_conic_5pts(five_on({100, 80}, 20, 12, kPi / 6));
  const Conic frozen{-8.669628887224422e-05, 9.240761671039709e-05, -0.0001400478512551638,
                     0.009946648437617079, 0.013166894529786494};
  EXPECT_NEAR(q.a / frozen.a, 1.0, 1e-8);
  EXPECT_NEAR(q.b / frozen.b, 1.0, 1e-8);
  EXPECT_NEAR(q.c / frozen.c, 1.0, 1e-8);
  EXPECT_NEAR(q.d / frozen.d, 1.0, 1e-8);
  EXPECT_NEAR(q.e / frozen.e, 1.0, 1e-8);
  const auto c = conic_center(q);
  EXPECT_NEAR(c.x, 100.0, 1e-6);
  EXPECT_NEAR(c.y, 80.0, 1e-6);
}

TEST(Conic, OffsetCircleSignConvention) {
  const Conic q{-1.0 / 3, 0.0, -1.0 / 3, 4.0 / 3, 0.0};
  EXPECT_NEAR(q.discriminant(), 4.0 / 9, 1e-15);
  const auto c = conic_center(q);
  EXPECT_NEAR(c.x, 2.0, 1e-12);
  EXPECT_NEAR(c.y, 0.0, 1e-12);
  const auto e = conic_to_ellipse_params(q);
  EXPECT_NEAR(e.major, 1.0, 1e-12);
  EXPECT_NEAR(e.minor, 1.0, 1e-12);
}

TEST(Conic, ParabolaIsNotAnEllipse) {
  const Conic parabola{1.0, 2.0, 1.0, 0.5, 0.0};
  EXPECT_EQ(parabola.discriminant(), 0.0);
  EXPECT_EQ(error_of([&] { conic_center(parabola); }), EllipseErrorKind::kNotAnEllipse);
  const Conic hyperbola{1.0, 0.0, -1.0, 0.0, 0.0};
  EXPECT_EQ(error_of([&] { conic_to_ellipse_params(hyperbola); }), EllipseErrorKind::kNotAnEllipse);
}

TEST(Conic, ImaginaryEllipseIsDegenerate) {
  // x^2 + y^2 = -1 has a positive discriminant but no real points.
  const Conic q{-1.0, 0.0, -1.0, 0.0, 0.0};
  EXPECT_FALSE(try_conic_to_ellipse_params(q).has_value());
}

TEST(Conic, AxisAlignedParams) {
  const auto e = conic_to_ellipse_params(Conic{1.0 / 25, 0.0, 1.0 / 9, 0.0, 0.0});
  EXPECT_NEAR(e.major, 5.0, 1e-12);
  EXPECT_NEAR(e.minor, 3.0, 1e-12);
  EXPECT_NEAR(e.angle, 0.0, 1e-12);
  const auto circle = conic_to_ellipse_params(Conic{1, 0, 1, 0, 0});
  EXPECT_NEAR(circle.major, 1.0, 1e-12);
  EXPECT_NEAR(circle.minor, 1.0, 1e-12);
  EXPECT_EQ(circle.angle, 0.0);
  const auto tall = conic_to_ellipse_params(Conic{1.0 / 9, 0.0, 1.0 / 25, 0.0, 0.0});
  EXPECT_NEAR(tall.angle, kPi / 2, 1e-12);
}

TEST(Conic, RandomCentersAndRoundTrip) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> cx(30, 316), cy(30, 230), ax(3, 40), ratio(0.3, 0.95),
      th(0, kPi), phase(0, 2 * kPi);
  for (int i = 0; i < 100; ++i) {
    const Point2 c{cx(rng), cy(rng)};
    const double a = ax(rng), b = a * ratio(rng), t = th(rng);
    const auto q = fit_conic_5pts(five_on(c, a, b, t, phase(rng)));
    const auto got = conic_center(q);
    EXPECT_NEAR(got.x, c.x, 1e-6);
    EXPECT_NEAR(got.y, c.y, 1e-6);

    const auto ref = oracle::conic_from_geometry(c, a, b, t);
    const auto p = conic_to_ellipse_params(ref);
    EXPECT_NEAR(p.major / a, 1.0, 1e-6);
    EXPECT_NEAR(p.minor / b, 1.0, 1e-6);
    EXPECT_NEAR(p.angle, t, 1e-6);
    const auto back = ellipse_params_to_conic(p);
    EXPECT_NEAR(back.a / ref.a, 1.0, 1e-6);
    EXPECT_NEAR(back.c / ref.c, 1.0, 1e-6);
    EXPECT_NEAR(back.d / ref.d, 1.0, 1e-6);
    EXPECT_NEAR(back.e / ref.e, 1.0, 1e-6);
  }
}

TEST(Conic, SampsonDistanceOfCircle) {
  const auto q = oracle::conic_from_geometry({50, 50}, 10, 10, 0);
  EXPECT_NEAR(sampson_distance(q, {60, 50}), 0.0, 1e-9);
  EXPECT_NEAR(sampson_distance(q, {61, 50}), 1.0, 0.1);
}

TEST(Conic, LeastSquaresExactOnCleanPoints) {
  const auto pts = ring({80, 60}, 15, 9, 0.7, 40);
  const auto q = fit_conic_least_squares(pts);
  ASSERT_TRUE(q.has_value());
  const auto c = conic_center(*q);
  EXPECT_NEAR(c.x, 80.0, 1e-8);
  EXPECT_NEAR(c.y, 60.0, 1e-8);
}

TEST(Ransac, TooFewPoints) {
  const auto pts = ring({80, 60}, 15, 9, 0.7, 4);
  EXPECT_EQ(error_of([&] { ransac_fit(pts); }), EllipseErrorKind::kInsufficientPoints);
}

TEST(Ransac, InvalidConfig) {
  const auto pts = ring({80, 60}, 15, 9, 0.7, 20);
  RansacConfig cfg;
  cfg.iterations = 0;
  EXPECT_EQ(error_of([&] { ransac_fit(pts, cfg); }), EllipseErrorKind::kInvalidConfig);
  cfg = {};
  cfg.inlier_tol_px = 0;
  EXPECT_EQ(error_of([&] { ransac_fit(pts, cfg); }), EllipseErrorKind::kInvalidConfig);
}

TEST(Ransac, NoiselessPoints) {
  const auto pts = ring({100, 80}, 20, 12, kPi / 6, 60);
  const auto fit = ransac_fit(pts);
  EXPECT_EQ(fit.inlier_ratio, 1.0);
  EXPECT_EQ(fit.inlier_count, 60u);
  EXPECT_NEAR(fit.center.x, 100.0, 1e-3);
  EXPECT_NEAR(fit.center.y, 80.0, 1e-3);
  EXPECT_NEAR(fit.major, 20.0, 1e-3);
  EXPECT_NEAR(fit.minor, 12.0, 1e-3);
  EXPECT_NEAR(fit.angle, kPi / 6, 1e-3);
}

std::vector<Point2> noisy_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0, 2 * kPi), ux(0, 346), uy(0, 260);
  std::vector<Point2> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(oracle::ellipse_point({100, 80}, 20, 12, kPi / 6, phase(rng)));
  for (int i = 0; i < 25; ++i) pts.push_back({ux(rng), uy(rng)});
  return pts;
}

TEST(Ransac, RecoversCenterWithOutliers) {
  const auto pts = noisy_scene(1);
  RansacConfig cfg;
  cfg.rng_seed = 1;
  const auto fit = ransac_fit(pts, cfg);
  EXPECT_LT(std::hypot(fit.center.x - 100, fit.center.y - 80), 1.0);
  EXPECT_GE(fit.inlier_count, 60u);
}

TEST(Ransac, SeedDeterminism) {
  const auto pts = noisy_scene(2);
  RansacConfig cfg;
  cfg.rng_seed = 42;
  const auto a = ransac_fit(pts, cfg);
  const auto b = ransac_fit(pts, cfg);
  EXPECT_EQ(a.conic, b.conic);
  EXPECT_EQ(a.center.x, b.center.x);
  EXPECT_EQ(a.center.y, b.center.y);
  EXPECT_EQ(a.major, b.major);
  EXPECT_EQ(a.minor, b.minor);
  EXPECT_EQ(a.angle, b.angle);
  EXPECT_EQ(a.inliers, b.inliers);
  EXPECT_EQ(a.mean_inlier_distance, b.mean_inlier_distance);
}

TEST(Ransac, InlierConsistency) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = noisy_scene(seed);
    RansacConfig cfg;
    cfg.rng_seed = seed;
    const auto fit = ransac_fit(pts, cfg);
    EXPECT_EQ(fit.inliers.size(), fit.inlier_count);
    EXPECT_DOUBLE_EQ(fit.inlier_ratio, static_cast<double>(fit.inlier_count) / pts.size());
    EXPECT_TRUE(std::is_sorted(fit.inliers.begin(), fit.inliers.end()));
    std::size_t within = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      within += sampson_distance(fit.conic, pts[i]) <= cfg.inlier_tol_px ? 1 : 0;
    }
    EXPECT_EQ(within, fit.inlier_count);
    for (auto i : fit.inliers) EXPECT_LE(sampson_distance(fit.conic, pts[i]), cfg.inlier_tol_px);
    EXPECT_GE(fit.major, fit.minor);
    EXPECT_GT(fit.minor, 0.0);
    EXPECT_GE(fit.angle, 0.0);
    EXPECT_LT(fit.angle, kPi);
  }
}

TEST(Ransac, TranslationMovesCenter) {
  // The f = -1 form depends on the origin, so equality holds up to rounding.
  const auto base = noisy_scene(5);
  RansacConfig cfg;
  cfg.rng_seed = 5;
  const auto a = ransac_fit(base, cfg);
  for (const Point2 d : {Point2{13, -7}, Point2{-40, 25}, Point2{100, 100}}) {
    auto moved = base;
    for (auto& p : moved) p = {p.x + d.x, p.y + d.y};
    const auto b = ransac_fit(moved, cfg);
    EXPECT_EQ(a.inliers, b.inliers);
    EXPECT_NEAR(b.center.x - a.center.x, d.x, 1e-6);
    EXPECT_NEAR(b.center.y - a.center.y, d.y, 1e-6);
  }
}

TEST(Ransac, AllOutliersGivesNoModel) {
  std::vector<Point2> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({static_cast<double>(i), 2.0 * i + 1});
  EXPECT_EQ(error_of([&] { ransac_fit(pts); }), EllipseErrorKind::kNoModelFound);
}

}  // namespace
}  // namespace eyelabel
