// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace sfield {

namespace {

constexpr double kMinHitT = 1e-9;

/// Classic gradient noise over a seeded permutation, values in [-1, 1].
class Noise3 {
  public:
    explicit Noise3(unsigned seed) {
        std::iota(perm_.begin(), perm_.begin() + 256, 0);
        RngStream rng(seed);
        for (int i = 255; i > 0; --i) {
            int j = int(uniform01(rng) * (i + 1));
            j = std::min(j, i);
            std::swap(perm_[std::size_t(i)], perm_[std::size_t(j)]);
        }
        for (int i = 0; i < 256; ++i) perm_[std::size_t(256 + i)] = perm_[std::size_t(i)];
    }

    double operator()(double x, double y, double z) const {
        const int xi = wrap(x), yi = wrap(y), zi = wrap(z);
        x -= std::floor(x);
        y -= std::floor(y);
        z -= std::floor(z);
        const double u = fade(x), v = fade(y), w = fade(z);
        const int a = at(xi) + yi, aa = at(a) + zi, ab = at(a + 1) + zi;
        const int b = at(xi + 1) + yi, ba = at(b) + zi, bb = at(b + 1) + zi;
        return lerp(w,
                    lerp(v, lerp(u, grad(at(aa), x, y, z), grad(at(ba), x - 1, y, z)),
                         lerp(u, grad(at(ab), x, y - 1, z), grad(at(bb), x - 1, y - 1, z))),
                    lerp(v,
                         lerp(u, grad(at(aa + 1), x, y, z - 1), grad(at(ba + 1), x - 1, y, z - 1)),
                         lerp(u, grad(at(ab + 1), x, y - 1, z - 1),
                              grad(at(bb + 1), x - 1, y - 1, z - 1))));
    }

  private:
    static int wrap(double v) { return int(std::floor(v)) & 255; }
    int at(int i) const { return perm_[std::size_t(i & 511)]; }
    static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
    static double lerp(double t, double a, double b) { return a + t * (b - a); }
    static double grad(int hash, double x, double y, double z) {
        const int h = hash & 15;
        const double u = h < 8 ? x : y;
        const double v = h < 4 ? y : (h == 12 || h == 14 ? x : z);
        return ((h & 1) ? -u : u) + ((h & 2) ? -v : v);
    }

    std::array<int, 512> perm_{};
};

Rgb<double> lerp_rgb(const Rgb<double>& a, const Rgb<double>& b, double t) {
    return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
}

Rgb<double> eval_material(const Material& m, const Vec3& p, const Noise3& noise) {
    switch (m.texture) {
        case TextureKind::kSolid: return m.color_a;
        case TextureKind::kChecker: {
            const long k = long(std::floor(p.x / m.scale)) + long(std::floor(p.y / m.scale)) +
                           long(std::floor(p.z / m.scale));
            return (k & 1) ? m.color_b : m.color_a;
        }
        case TextureKind::kNoise: {
            const double n = noise(p.x / m.scale, p.y / m.scale, p.z / m.scale);
            const double t = std::clamp(0.5 * (1.0 + 1.6 * n), 0.0, 1.0);
            return lerp_rgb(m.color_a, m.color_b, t);
        }
    }
    return m.color_a;
}

bool hit_sphere(const Sphere& s, const Ray& ray, double& t) {
    const Vec3 oc = ray.origin - s.center;
    const double b = dot(oc, ray.dir);
    const double c = dot(oc, oc) - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0) return false;
    const double sq = std::sqrt(disc);
    double root = -b - sq;
    if (root <= kMinHitT) root = -b + sq;
    if (root <= kMinHitT) return false;
    t = root;
    return true;
}

bool hit_rect(const Rect& r, const Ray& ray, double& t) {
    const Vec3 n = cross(r.eu, r.ev);
    const double denom = dot(ray.dir, n);
    if (std::abs(denom) < 1e-12) return false;
    const double tt = dot(r.origin - ray.origin, n) / denom;
    if (tt <= kMinHitT) return false;
    const Vec3 rel = ray.at(tt) - r.origin;
    // rel = u*eu + v*ev in the rect's (possibly skew) basis
    const double ee = dot(r.eu, r.eu), ef = dot(r.eu, r.ev), ff = dot(r.ev, r.ev);
    const double det = ee * ff - ef * ef;
    if (std::abs(det) < 1e-18) return false;
    const double re = dot(rel, r.eu), rf = dot(rel, r.ev);
    const double u = (re * ff - rf * ef) / det;
    const double v = (rf * ee - re * ef) / det;
    if (u < 0 || u > 1 || v < 0 || v > 1) return false;
    t = tt;
    return true;
}

bool hit_box(const AABox& box, const Ray& ray, double& t) {
    double t0 = kMinHitT, t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        const double o = ray.origin[a], d = ray.dir[a];
        if (std::abs(d) < 1e-15) {
            if (o < box.lo[a] || o > box.hi[a]) return false;
            continue;
        }
        double ta = (box.lo[a] - o) / d, tb = (box.hi[a] - o) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    t = t0;
    return t > kMinHitT && std::isfinite(t);
}

const Material* closest_hit(const AnalyticScene& sc, const Ray& ray, double& best) {
    best = std::numeric_limits<double>::infinity();
    const Material* mat = nullptr;
    double t;
    for (const auto& s : sc.spheres)
        if (hit_sphere(s, ray, t) && t < best) {
            best = t;
            mat = &s.mat;
        }
    for (const auto& r : sc.rects)
        if (hit_rect(r, ray, t) && t < best) {
            best = t;
            mat = &r.mat;
        }
    for (const auto& b : sc.boxes)
        if (hit_box(b, ray, t) && t < best) {
            best = t;
            mat = &b.mat;
        }
    return mat;
}

}  // namespace

std::optional<SceneHit> AnalyticScene::first_hit(const Ray& ray) const {
    double t;
    const Material* mat = closest_hit(*this, ray, t);
    if (!mat) return std::nullopt;
    const Noise3 noise(noise_seed);
    SceneHit hit;
    hit.t = t;
    hit.point = ray.at(t);
    hit.albedo = eval_material(*mat, hit.point, noise);
    return hit;
}

AnalyticScene default_scene() {
    AnalyticScene sc;
    sc.noise_seed = 1234;

    Material wall;
    wall.texture = TextureKind::kChecker;
    wall.color_a = {0.82, 0.74, 0.58};
    wall.color_b = {0.22, 0.28, 0.38};
    wall.scale = 0.1375;
    sc.rects.push_back({{-1.05, -0.65, -1.875}, {1.475, 0, 0}, {0, 1.3, 0}, wall});

    Material floor;
    floor.texture = TextureKind::kNoise;
    floor.color_a = {0.72, 0.62, 0.42};
    floor.color_b = {0.3, 0.26, 0.18};
    floor.scale = 0.225;
    sc.rects.push_back({{-0.875, -0.3125, -0.35}, {1.75, 0, 0}, {0, 0, -1.525}, floor});

    Material ball;
    ball.texture = TextureKind::kNoise;
    ball.color_a = {0.78, 0.28, 0.2};
    ball.color_b = {0.9, 0.62, 0.3};
    ball.scale = 0.0875;
    sc.spheres.push_back({{0.1375, -0.0125, -0.775}, 0.125, ball});

    Material marble;
    marble.texture = TextureKind::kChecker;
    marble.color_a = {0.88, 0.84, 0.3};
    marble.color_b = {0.2, 0.26, 0.66};
    marble.scale = 0.04;
    sc.spheres.push_back({{-0.125, 0.075, -0.4125}, 0.0675, marble});

    Material crate;
    crate.texture = TextureKind::kChecker;
    crate.color_a = {0.6, 0.44, 0.3};
    crate.color_b = {0.34, 0.22, 0.14};
    crate.scale = 0.0675;
    sc.boxes.push_back({{-0.475, -0.3125, -1.325}, {-0.2125, -0.0375, -1.0625}, crate});

    return sc;
}

RGBDImage raytrace_clean(const AnalyticScene& scene, const CameraIntrinsics& intr,
                         const Pose& pose) {
    intr.validate();
    pose.validate();
    const Noise3 noise(scene.noise_seed);
    RGBDImage out;
    out.rgb = Image3(intr.width, intr.height, 0.0);
    out.depth = Image1(intr.width, intr.height, 0.0);
    for (int y = 0; y < intr.height; ++y)
        for (int x = 0; x < intr.width; ++x) {
            const Ray ray = generate_ray(intr, pose, x + 0.5, y + 0.5, 1e-4, 1e4);
            double t;
            if (const Material* mat = closest_hit(scene, ray, t)) {
                out.rgb.set_rgb(x, y, eval_material(*mat, ray.at(t), noise));
                out.depth.at(x, y) = t;
            }
        }
    return out;
}

}  // namespace sfield
