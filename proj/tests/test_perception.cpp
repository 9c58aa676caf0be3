/*
 * Copyright (C) 2026 The brickbot authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brickbot/error.hpp"
#include "brickbot/perception.hpp"

using namespace brickbot;

namespace {

WorldState world_with(const std::vector<Vec3>& centroids, double yaw = 0.0) {
  std::vector<Brick> bricks;
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    Brick b;
    b.index = static_cast<int>(i);
    b.spec = BrickCatalog{}[BrickClass::G];
    b.pose = Pose6D::from_yaw(centroids[i], yaw);
    bricks.push_back(b);
  }
  return WorldState(bricks, Pose6D{}, Pose2D(0, 0, 0), 1);
}

CameraModel short_camera() {
  CameraModel c;
  c.max_range = 6.0;
  return c;
}

}  // namespace

TEST(Detect, OnAxisBrick) {
  const WorldState w = world_with({Vec3(4, 0, 0.1)});
  const auto d = detect(w, short_camera());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].pixel_centroid.u, 320.0);
  EXPECT_DOUBLE_EQ(d[0].pixel_centroid.v, 240.0);
  EXPECT_DOUBLE_EQ(d[0].range, 4.0);
  EXPECT_EQ(d[0].brick_class, BrickClass::G);
  EXPECT_GT(d[0].mask_area_fraction, 0.0);
  EXPECT_LE(d[0].mask_area_fraction, 1.0);
}

TEST(Detect, BehindIsInvisible) {
  EXPECT_TRUE(detect(world_with({Vec3(-4, 0, 0.1)}), short_camera()).empty());
}

TEST(Detect, TwoBricks) {
  const auto d = detect(world_with({Vec3(3, 0.5, 0.1), Vec3(5, -1, 0.1)}), short_camera());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[0].range, std::hypot(3, 0.5), 1e-12);
  EXPECT_NEAR(d[1].range, std::hypot(5, 1), 1e-12);
}

TEST(Detect, SkipsCarriedAndPlaced) {
  WorldState w = world_with({Vec3(3, 0, 0.1), Vec3(4, 0, 0.1)});
  w.bricks[0].status = BrickStatus::Placed;
  const auto d = detect(w, short_camera());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].brick_index, 1);
}

TEST(Detect, ShrinkingRangeNeverAdds) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-20, 20);
  std::vector<Vec3> pts;
  for (int i = 0; i < 60; ++i) pts.emplace_back(u(rng), u(rng), 0.1);
  const WorldState w = world_with(pts);
  CameraModel cam;
  std::size_t previous = detect(w, cam).size();
  for (double r : {20.0, 15.0, 10.0, 5.0, 1.0}) {
    cam.max_range = r;
    const auto d = detect(w, cam);
    EXPECT_LE(d.size(), previous);
    previous = d.size();
    for (const auto& det : d) EXPECT_LE(det.range, r);
  }
}

TEST(Detect, Pure) {
  const WorldState w = world_with({Vec3(3, 0.5, 0.1), Vec3(5, -1, 0.1)});
  const auto a = detect(w, CameraModel{});
  const auto b = detect(w, CameraModel{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].pixel_centroid.u, b[i].pixel_centroid.u);
    EXPECT_EQ(a[i].range, b[i].range);
  }
}

TEST(Track, BearingSign) {
  // Bearing +0.2 rad is to the right, i.e. negative world y for a vehicle facing +x.
  const WorldState w = world_with({Vec3(4 * std::cos(0.2), -4 * std::sin(0.2), 0.1)});
  const TargetTrack t = track_target(w, CameraModel{}, 0);
  ASSERT_TRUE(t.valid);
  EXPECT_GT(t.pixel_centroid.u, 320.0);
  EXPECT_NEAR(t.pixel_centroid.u, 320.0 + 640.0 / 1.2 * 0.2, 1e-9);
  EXPECT_NEAR(t.range, 4.0, 1e-12);
}

TEST(Track, InvalidAndUnknown) {
  const WorldState w = world_with({Vec3(30, 0, 0.1)});
  EXPECT_FALSE(track_target(w, CameraModel{}, 0).valid);
  EXPECT_THROW(track_target(w, CameraModel{}, 3), UnknownBrick);
}

TEST(Track, MountOffset) {
  const WorldState w = world_with({Vec3(0, 4, 0.1)});
  CameraModel cam;
  EXPECT_FALSE(track_target(w, cam, 0).valid);
  cam.mount = Pose2D(0, 0, std::numbers::pi / 2);
  const TargetTrack t = track_target(w, cam, 0);
  ASSERT_TRUE(t.valid);
  EXPECT_NEAR(t.pixel_centroid.u, 320.0, 1e-9);
}

TEST(Cloud, NoiselessLiesOnPatch) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> yaw(-3.1, 3.1);
  for (int i = 0; i < 200; ++i) {
    const double a = yaw(rng);
    const WorldState w = world_with({Vec3(4, 0.5, 0.1)}, a);
    const Brick& b = w.bricks[0];
    const PointCloud c = ferromagnetic_cloud(w, CameraModel{}, 0, 0.0, rng);
    ASSERT_EQ(c.points.size(), 60u);
    const Vec3 center = b.pose.centroid + 0.5 * b.spec.height * Vec3::UnitZ();
    Vec3 mean = Vec3::Zero();
    for (const auto& p : c.points) {
      const Vec3 d = p - center;
      EXPECT_NEAR(d.dot(b.pose.normal_axis), 0.0, 1e-12);
      EXPECT_LE(std::abs(d.dot(b.pose.major_axis)), kFerroLength / 2 + 1e-12);
      EXPECT_LE(std::abs(d.dot(b.pose.minor_axis)), kFerroWidth / 2 + 1e-12);
      mean += p;
    }
    mean /= 60.0;
    EXPECT_NEAR((mean - center).norm(), 0.0, 1e-12);
    const Pose6D est = pca_pose(c);
    EXPECT_NEAR(std::abs(est.major_axis.dot(b.pose.major_axis)), 1.0, 1e-9);
    EXPECT_NEAR((est.centroid - center).norm(), 0.0, 1e-9);
  }
}

TEST(Cloud, NoiseDrawsOnlyWhenEnabled) {
  const WorldState w = world_with({Vec3(4, 0, 0.1)});
  std::mt19937_64 a(5);
  std::mt19937_64 b(5);
  ferromagnetic_cloud(w, CameraModel{}, 0, 0.0, a);
  EXPECT_EQ(a, b);

  std::mt19937_64 c(5);
  std::mt19937_64 d(5);
  const PointCloud x = ferromagnetic_cloud(w, CameraModel{}, 0, 0.005, c);
  const PointCloud y = ferromagnetic_cloud(w, CameraModel{}, 0, 0.005, d);
  for (std::size_t i = 0; i < x.points.size(); ++i) EXPECT_EQ(x.points[i], y.points[i]);
  EXPECT_NE(c, std::mt19937_64(5));
}

TEST(Cloud, Errors) {
  std::mt19937_64 rng(1);
  const WorldState w = world_with({Vec3(-4, 0, 0.1)});
  EXPECT_THROW(ferromagnetic_cloud(w, CameraModel{}, 0, 0.0, rng), NotVisible);
  EXPECT_THROW(ferromagnetic_cloud(w, CameraModel{}, 4, 0.0, rng), UnknownBrick);
}
