// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "sfield/scene.hpp"

using namespace sfield;

static CameraIntrinsics test_intr() {
    CameraIntrinsics in;
    in.fx = 140.0;
    in.fy = 140.0;
    in.cx = 64.0;
    in.cy = 48.0;
    in.width = 128;
    in.height = 96;
    return in;
}

TEST_CASE("fronto-parallel plane has depth 2 / |dir_z| at every pixel") {
    AnalyticScene scene;
    Rect wall;
    wall.origin = {-50, -50, -2};
    wall.eu = {100, 0, 0};
    wall.ev = {0, 100, 0};
    wall.mat.color_a = {0.3, 0.6, 0.9};
    scene.rects.push_back(wall);

    const CameraIntrinsics intr = test_intr();
    const Pose id;
    RGBDImage img = raytrace_clean(scene, intr, id);
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            Ray r = generate_ray(intr, id, x + 0.5, y + 0.5, 1e-4, 1e4);
            const double expect = 2.0 / std::abs(r.dir.z);
            CHECK(img.depth.at(x, y) == doctest::Approx(expect).epsilon(1e-9));
            CHECK(img.rgb.rgb(x, y)[2] == doctest::Approx(0.9));
        }
    }
}

TEST_CASE("empty scene renders black with the depth sentinel everywhere") {
    AnalyticScene scene;
    RGBDImage img = raytrace_clean(scene, test_intr(), Pose{});
    for (double v : img.rgb.data) CHECK(v == 0.0);
    for (double v : img.depth.data) CHECK(v == 0.0);
}

TEST_CASE("sphere silhouette area matches the projected-circle formula") {
    AnalyticScene scene;
    Sphere s;
    s.center = {0, 0, -3};
    s.radius = 0.5;
    scene.spheres.push_back(s);

    const CameraIntrinsics intr = test_intr();
    RGBDImage img = raytrace_clean(scene, intr, Pose{});
    int hits = 0;
    for (double v : img.depth.data)
        if (v > 0) ++hits;

    const double d = 3.0, R = 0.5;
    const double r_px = intr.fx * R / std::sqrt(d * d - R * R);
    const double expect = M_PI * r_px * r_px;
    CHECK(std::abs(hits - expect) < 0.02 * expect);
}

TEST_CASE("nearest object wins") {
    AnalyticScene scene;
    Sphere near_s, far_s;
    near_s.center = {0, 0, -2};
    near_s.radius = 0.3;
    near_s.mat.color_a = {1, 0, 0};
    far_s.center = {0, 0, -5};
    far_s.radius = 0.3;
    far_s.mat.color_a = {0, 1, 0};
    scene.spheres.push_back(far_s);
    scene.spheres.push_back(near_s);  // container order must not matter

    Ray axis = generate_ray(test_intr(), Pose{}, 64.0, 48.0, 1e-4, 1e4);
    auto hit = scene.first_hit(axis);
    REQUIRE(hit.has_value());
    CHECK(hit->t == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(hit->albedo[0] == 1.0);
    CHECK(hit->albedo[1] == 0.0);
}

TEST_CASE("checker and noise textures vary across a surface") {
    AnalyticScene scene;
    Rect wall;
    wall.origin = {-50, -50, -4};
    wall.eu = {100, 0, 0};
    wall.ev = {0, 100, 0};
    wall.mat.texture = TextureKind::kChecker;
    wall.mat.color_a = {0.9, 0.1, 0.1};
    wall.mat.color_b = {0.1, 0.1, 0.9};
    wall.mat.scale = 0.5;
    scene.rects.push_back(wall);

    RGBDImage img = raytrace_clean(scene, test_intr(), Pose{});
    std::set<double> reds(img.rgb.data.begin(), img.rgb.data.end());
    bool has_a = false, has_b = false;
    for (int i = 0; i < img.rgb.width * img.rgb.height; ++i) {
        if (img.rgb.data[3 * i] == 0.9) has_a = true;
        if (img.rgb.data[3 * i] == 0.1) has_b = true;
    }
    CHECK(has_a);
    CHECK(has_b);

    scene.rects[0].mat.texture = TextureKind::kNoise;
    scene.noise_seed = 77;
    RGBDImage noisy = raytrace_clean(scene, test_intr(), Pose{});
    std::set<double> values;
    for (int i = 0; i < noisy.rgb.width * noisy.rgb.height; ++i)
        values.insert(noisy.rgb.data[3 * std::size_t(i)]);
    CHECK(values.size() > 100);  // smooth field, nearly every pixel distinct
    for (double v : noisy.rgb.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("default scene covers the working range and keeps an empty margin") {
    AnalyticScene scene = default_scene();
    const CameraIntrinsics intr = test_intr();
    Pose pose = Pose::look_at({0, 0, 0.05}, {0, 0, -1}, {0, 1, 0});
    RGBDImage img = raytrace_clean(scene, intr, pose);

    int hits = 0, misses = 0;
    double zmin = 1e9, zmax = 0;
    for (double z : img.depth.data) {
        if (z > 0) {
            ++hits;
            zmin = std::min(zmin, z);
            zmax = std::max(zmax, z);
        } else {
            ++misses;
        }
    }
    CHECK(img.depth.at(intr.width / 2, intr.height / 2) > 0);
    CHECK(hits > 0);
    CHECK(misses > 0);
    CHECK(double(misses) / (hits + misses) < 0.35);
    CHECK(zmin > 0.1);
    CHECK(zmax < 2.6);
    CHECK(zmax - zmin > 0.75);  // genuine depth spread for medium recovery

    for (double v : img.rgb.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    RGBDImage again = raytrace_clean(scene, intr, pose);
    CHECK(again.rgb.data == img.rgb.data);
    CHECK(again.depth.data == img.depth.data);
}
