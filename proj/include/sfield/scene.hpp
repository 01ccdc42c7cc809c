// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "sfield/formation.hpp"
#include "sfield/geometry.hpp"

namespace sfield {

enum class TextureKind { kSolid, kChecker, kNoise };

/// Lambertian albedo, evaluated procedurally at the hit point. Clean renders
/// are unlit albedo images, which keeps the restoration ground truth exact.
struct Material {
    TextureKind texture = TextureKind::kSolid;
    Rgb<double> color_a{0.5, 0.5, 0.5};
    Rgb<double> color_b{0.5, 0.5, 0.5};
    double scale = 1.0;  // world-space feature size (m)
};

struct Sphere {
    Vec3 center;
    double radius = 1;
    Material mat;
};

/// Finite parallelogram: corner plus two edge vectors.
struct Rect {
    Vec3 origin, eu, ev;
    Material mat;
};

struct AABox {
    Vec3 lo, hi;
    Material mat;
};

struct SceneHit {
    double t = 0;  // distance along the unit ray direction
    Vec3 point;
    Rgb<double> albedo{};
};

/// Analytic scene with exact ray intersections. The background is empty
/// space: rays that hit nothing return no SceneHit.
struct AnalyticScene {
    std::vector<Sphere> spheres;
    std::vector<Rect> rects;
    std::vector<AABox> boxes;
    unsigned noise_seed = 0;

    std::optional<SceneHit> first_hit(const Ray& ray) const;
};

/// Desk-scale default: textured back wall, noisy floor, two spheres and a
/// box spanning roughly 0.3 m to 2.3 m of range, with an empty background
/// region at the frame edges. The range is chosen so the reference medium
/// coefficients produce strong but invertible degradation (attenuation
/// factors of a few percent at the far wall, unsaturated backscatter).
AnalyticScene default_scene();

/// Exact first-hit albedo and hit distance per pixel center. Misses are
/// black with the depth sentinel 0.
RGBDImage raytrace_clean(const AnalyticScene& scene, const CameraIntrinsics& intr,
                         const Pose& pose);

}  // namespace sfield
