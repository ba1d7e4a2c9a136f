// Copyright 2026 The terranav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "terranav/error.hpp"
#include "terranav/terrain.hpp"
#include "test_util.hpp"

namespace terranav {
namespace {

using testing::height_field;
using testing::make_geometry;

constexpr double kPi = std::numbers::pi;

TEST(GridGeometry, LookupsResolveToOneCell) {
  const GridGeometry g = make_geometry(10, 6, 0.5);
  EXPECT_EQ(g.cell_at({0.0, 0.0}), (Cell{0, 0}));
  EXPECT_EQ(g.cell_at({0.4999, 0.2}), (Cell{0, 0}));
  EXPECT_EQ(g.cell_at({0.5, 0.2}), (Cell{1, 0}));
  EXPECT_FALSE(g.find_cell({5.0, 1.0}).has_value());
  EXPECT_FALSE(g.find_cell({-0.01, 1.0}).has_value());
  EXPECT_TRUE(g.find_cell({4.999, 2.999}).has_value());
  EXPECT_THROW((GridGeometry{0.0, Vec2::Zero(), 1, 1}.validate()), Error);
}

TEST(SurfaceNormal, FlatMapPointsUp) {
  const GridMap2D flat(make_geometry(8, 8), 0.0);
  const Vec3 n = surface_normal(flat, {1.7, 2.2});
  EXPECT_NEAR((n - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(SurfaceNormal, PlaneAlongX) {
  const GridMap2D plane = height_field(make_geometry(10, 10), [](double x, double) { return x; });
  for (Vec2 p : {Vec2(1.1, 1.3), Vec2(2.5, 3.0), Vec2(3.9, 2.2)}) {
    const Vec3 n = surface_normal(plane, p);
    EXPECT_NEAR(n.x(), -std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(n.y(), 0.0, 1e-12);
    EXPECT_NEAR(n.z(), std::sqrt(0.5), 1e-12);
  }
}

TEST(SurfaceNormal, AffineFieldIsConstantAcrossInterior) {
  const GridMap2D plane =
      height_field(make_geometry(12, 9), [](double x, double y) { return 0.3 * x - 0.7 * y + 2.0; });
  const Vec3 ref = surface_normal(plane, {2.0, 2.0});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.8, 5.2), uy(0.8, 3.7);
  for (int i = 0; i < 200; ++i) EXPECT_LT((surface_normal(plane, {ux(rng), uy(rng)}) - ref).norm(), 1e-12);
}

TEST(SurfaceNormal, MatchesLocalPlaneFit) {
  // Least-squares plane over the 3x3 cell neighborhood of the query's cell.
  const GridGeometry g = make_geometry(30, 30, 0.5);
  const GridMap2D z = height_field(g, [](double x, double y) {
    return 0.4 * std::sin(0.35 * x) + 0.3 * std::cos(0.27 * y + 0.5) + 0.1 * std::sin(0.2 * x * y / 5.0);
  });
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(2.0, 13.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p(u(rng), u(rng));
    const Cell c = g.cell_at(p);
    Eigen::MatrixXd a(9, 3);
    Eigen::VectorXd b(9);
    int k = 0;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc, ++k) {
        const Vec2 q = g.cell_center({c.col + dc, c.row + dr});
        a.row(k) << q.x(), q.y(), 1.0;
        b[k] = z(c.col + dc, c.row + dr);
      }
    const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
    const Vec3 fit = Vec3(-coef[0], -coef[1], 1.0).normalized();
    const Vec3 n = surface_normal(z, p);
    EXPECT_LT(std::acos(std::clamp(n.dot(fit), -1.0, 1.0)), 0.05);
    EXPECT_GT(n.z(), 0.0);
  }
}

TEST(SurfaceNormal, RequiresOneCellMargin) {
  const GridMap2D flat(make_geometry(8, 8), 0.0);
  EXPECT_THROW(surface_normal(flat, {0.1, 2.0}), Error);
  EXPECT_THROW(surface_normal(flat, {2.0, 3.99}), Error);
  EXPECT_THROW(surface_normal(flat, {-5.0, 2.0}), Error);
  EXPECT_FALSE(has_normal_support(flat, {0.1, 2.0}));
  EXPECT_TRUE(has_normal_support(flat, {2.0, 2.0}));
  try {
    surface_normal(flat, {100.0, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoundary);
  }
}

TEST(Attitude, FlatGroundKeepsYaw) {
  const Attitude a = attitude_from_normal({0, 0, 1}, 1.2);
  EXPECT_DOUBLE_EQ(a.roll, 0.0);
  EXPECT_DOUBLE_EQ(a.pitch, 0.0);
  EXPECT_DOUBLE_EQ(a.yaw, 1.2);
}

TEST(Attitude, PurePitchOnPlaneAlongX) {
  // The normal of z = x tilts toward -x. With the Z-Y-X rotation the third
  // column (sin(pitch), 0, cos(pitch)) at yaw 0 equals it for pitch = -pi/4.
  const Vec3 n(-std::sqrt(0.5), 0.0, std::sqrt(0.5));
  const Attitude a = attitude_from_normal(n, 0.0);
  EXPECT_NEAR(a.roll, 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.pitch), kPi / 4, 1e-12);
  EXPECT_NEAR((rotation_body_to_world(a).col(2) - n).norm(), 0.0, 1e-12);
  EXPECT_NEAR(a.pitch, -kPi / 4, 1e-12);
}

TEST(Attitude, ThirdColumnReconstructsNormal) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-kPi, kPi), tilt(0.0, 80.0 * kPi / 180.0);
  for (int i = 0; i < 2000; ++i) {
    const double t = tilt(rng), az = ang(rng), yaw = ang(rng);
    const Vec3 n(std::sin(t) * std::cos(az), std::sin(t) * std::sin(az), std::cos(t));
    const Attitude a = attitude_from_normal(n, yaw);
    const Mat3 r = rotation_body_to_world(a);
    EXPECT_LT((r.col(2) - n).norm(), 1e-9);
    EXPECT_NEAR(a.yaw, yaw, 0.0);
    EXPECT_LT(std::abs(a.pitch), kPi / 2);
  }
}

TEST(Attitude, RotationIsProper) {
  const Mat3 r = rotation_body_to_world({0.3, -0.2, 2.1});
  EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-14);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
}

TEST(Attitude, SlopeCap) {
  const double t = 86.0 * kPi / 180.0;
  try {
    attitude_from_normal({std::sin(t), 0.0, std::cos(t)}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSlopeCap);
  }
}

// Direct per-definition recomputation used as the oracle.
double oracle_tgeo(const GridMap2D& z, int col, int row, const TraversabilityWeights& w,
                   const TraversabilityScales& s, int radius) {
  const int wdt = z.width(), hgt = z.height();
  const double res = z.resolution();
  double gx, gy;
  if (col == 0) gx = (z(1, row) - z(0, row)) / res;
  else if (col == wdt - 1) gx = (z(col, row) - z(col - 1, row)) / res;
  else gx = (z(col + 1, row) - z(col - 1, row)) / (2 * res);
  if (row == 0) gy = (z(col, 1) - z(col, 0)) / res;
  else if (row == hgt - 1) gy = (z(col, row) - z(col, row - 1)) / res;
  else gy = (z(col, row + 1) - z(col, row - 1)) / (2 * res);
  const double slope = std::atan(std::sqrt(gx * gx + gy * gy));
  std::vector<double> vals;
  for (int r = row - radius; r <= row + radius; ++r)
    for (int c = col - radius; c <= col + radius; ++c)
      if (c >= 0 && r >= 0 && c < wdt && r < hgt) vals.push_back(z(c, r));
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= vals.size();
  double var = 0, step = 0;
  for (double v : vals) {
    var += (v - mean) * (v - mean);
    step = std::max(step, std::abs(v - z(col, row)));
  }
  const double rough = std::sqrt(var / vals.size());
  const double v = w.w1 * std::min(1.0, slope / s.max_slope) + w.w2 * std::min(1.0, rough / s.max_roughness) +
                   w.w3 * std::min(1.0, step / s.max_step);
  return std::min(v, w.t_max);
}

TEST(Traversability, FlatIsZero) {
  const GridMap2D flat(make_geometry(9, 7), 3.0);
  const GridMap2D t = geometric_traversability(flat, {}, {}, 1);
  for (double v : t.values()) EXPECT_EQ(v, 0.0);
}

TEST(Traversability, RaisedCellSaturatesStepTerm) {
  TraversabilityScales s;
  GridMap2D z(make_geometry(9, 9), 0.0);
  z(4, 4) = s.max_step;
  TraversabilityWeights w{0.0, 0.0, 1.0, 1.0};
  const GridMap2D t = geometric_traversability(z, w, s, 1);
  for (int r = 3; r <= 5; ++r)
    for (int c = 3; c <= 5; ++c) EXPECT_NEAR(t(c, r), 1.0, 1e-12);
  EXPECT_EQ(t(0, 0), 0.0);
  const GridMap2D def = geometric_traversability(z, {}, s, 1);
  // Step term alone contributes exactly w3 at the ring cells.
  EXPECT_GE(def(3, 3), TraversabilityWeights{}.w3 - 1e-12);
}

TEST(Traversability, HillMatchesPerDefinitionOracle) {
  const GridGeometry g = make_geometry(40, 30);
  const GridMap2D z = height_field(g, [](double x, double y) {
    return 2.5 * std::exp(-((x - 10) * (x - 10) + (y - 7) * (y - 7)) / (2 * 16.0)) + 0.02 * std::sin(3 * x);
  });
  TraversabilityWeights w;
  TraversabilityScales s;
  for (int radius : {1, 2}) {
    const GridMap2D t = geometric_traversability(z, w, s, radius);
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) EXPECT_NEAR(t(c, r), oracle_tgeo(z, c, r, w, s, radius), 1e-12);
  }
}

TEST(Traversability, InvariantUnderDatumShiftAndBounded) {
  const GridGeometry g = make_geometry(20, 20);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.3);
  GridMap2D z(g, 0.0);
  for (double& v : z.values()) v = n(rng);
  GridMap2D shifted = z;
  for (double& v : shifted.values()) v += 17.25;
  const GridMap2D a = geometric_traversability(z, {}, {}, 1);
  const GridMap2D b = geometric_traversability(shifted, {}, {}, 1);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    EXPECT_NEAR(a.values()[i], b.values()[i], 1e-9);
    EXPECT_GE(a.values()[i], 0.0);
    EXPECT_LE(a.values()[i], 1.0);
  }
}

TEST(Traversability, WeightsMustSumToOne) {
  EXPECT_THROW((TraversabilityWeights{0.5, 0.5, 0.5, 1.0}.validate()), Error);
  EXPECT_THROW((TraversabilityWeights{1.0, 0.0, 0.0, 0.0}.validate()), Error);
}

TEST(Submap, SingleCell) {
  const GridGeometry g = make_geometry(6, 6);
  GridMap2D cost(g, 0.0);
  for (int i = 0; i < 36; ++i) cost.values()[i] = i;
  const CostPatch p = submap(cost, {1.3, 2.1}, 1, 1.0);
  ASSERT_EQ(p.values.size(), 1u);
  EXPECT_EQ(p.values[0], cost[g.cell_at({1.3, 2.1})]);
}

TEST(Submap, InteriorMatchesDirectIndexing) {
  const GridGeometry g = make_geometry(12, 10);
  GridMap2D cost(g, 0.0);
  for (std::size_t i = 0; i < cost.values().size(); ++i) cost.values()[i] = 0.01 * i;
  const Vec2 center(3.1, 2.6);
  const Cell mid = g.cell_at(center);
  const CostPatch p = submap(cost, center, 5, 1.0);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) EXPECT_EQ(p.at(r, c), cost(mid.col + c - 2, mid.row + r - 2));
}

TEST(Submap, EdgeFillsWithTMax) {
  const GridGeometry g = make_geometry(8, 8);
  const GridMap2D cost(g, 0.2);
  const CostPatch p = submap(cost, g.cell_center({1, 4}), 5, 1.0);
  for (int r = 0; r < 5; ++r) {
    EXPECT_EQ(p.at(r, 0), 1.0);
    for (int c = 1; c < 5; ++c) EXPECT_EQ(p.at(r, c), 0.2);
  }
  EXPECT_THROW(submap(cost, {1, 1}, 4, 1.0), Error);
  EXPECT_THROW(submap(cost, {1, 1}, 0, 1.0), Error);
}

}  // namespace
}  // namespace terranav
