// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sfield {

void CameraIntrinsics::validate() const {
    if (!(fx > 0) || !(fy > 0))
        throw std::invalid_argument("intrinsics: focal lengths must be positive");
    if (!(cx > 0 && cx < width) || !(cy > 0 && cy < height))
        throw std::invalid_argument("intrinsics: principal point outside image");
}

void Pose::validate() const {
    // R * R^T == I and det == +1, both to 1e-6
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double d = 0;
            for (int k = 0; k < 3; ++k) d += r[i][k] * r[j][k];
            const double want = i == j ? 1.0 : 0.0;
            if (std::abs(d - want) > 1e-6)
                throw std::invalid_argument("pose: rotation is not orthonormal");
        }
    }
    const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                       r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                       r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    if (std::abs(det - 1.0) > 1e-6)
        throw std::invalid_argument("pose: rotation determinant is not +1");
}

Pose Pose::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
    const Vec3 zc = normalized(eye - target);  // camera looks down -z
    const Vec3 xc = normalized(cross(up, zc));
    const Vec3 yc = cross(zc, xc);
    Pose p;
    for (int i = 0; i < 3; ++i) {
        p.r[i][0] = xc[i];
        p.r[i][1] = yc[i];
        p.r[i][2] = zc[i];
    }
    p.t = eye;
    return p;
}

SampleSet SampleSet::from_boundaries(std::vector<double> boundaries) {
    if (boundaries.size() < 2) throw std::invalid_argument("sample set needs >= 2 boundaries");
    SampleSet s;
    s.boundaries = std::move(boundaries);
    const std::size_t n = s.boundaries.size() - 1;
    s.deltas.resize(n);
    s.midpoints.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = s.boundaries[i], b = s.boundaries[i + 1];
        if (!std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("sample boundaries must be finite");
        if (!(b > a)) throw std::invalid_argument("sample boundaries must strictly increase");
        s.deltas[i] = b - a;
        s.midpoints[i] = 0.5 * (a + b);
    }
    return s;
}

Ray generate_ray(const CameraIntrinsics& intr, const Pose& pose, double px, double py,
                 double t_near, double t_far) {
    if (!(px >= 0 && px <= intr.width && py >= 0 && py <= intr.height))
        throw std::invalid_argument("generate_ray: pixel outside image bounds");
    if (!(t_near >= 0 && t_near < t_far))
        throw std::invalid_argument("generate_ray: need 0 <= t_near < t_far");
    // pixel rows grow downward, camera y grows upward
    const Vec3 d_cam{(px - intr.cx) / intr.fx, -(py - intr.cy) / intr.fy, -1.0};
    Ray ray;
    ray.origin = pose.t;
    ray.dir = normalized(pose.rotate(d_cam));
    ray.t_near = t_near;
    ray.t_far = t_far;
    return ray;
}

SampleSet stratified_sample(const Ray& ray, int n, bool jitter, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("stratified_sample: need n >= 2 intervals");
    const double w = (ray.t_far - ray.t_near) / n;
    std::vector<double> b(n + 1);
    b[0] = ray.t_near;
    b[n] = ray.t_far;
    for (int i = 1; i < n; ++i) {
        // boundary i lives in the bin [t_near + (i-1/2)w, t_near + (i+1/2)w);
        // adjacent bins are disjoint so strict ordering holds for any draws
        const double u = jitter ? uniform01(rng) : 0.5;
        b[i] = ray.t_near + (i - 0.5 + u) * w;
    }
    return SampleSet::from_boundaries(std::move(b));
}

SampleSet importance_resample(const SampleSet& coarse, std::span<const double> coarse_weights,
                              int n_fine, RngStream& rng) {
    const int nc = coarse.interval_count();
    if (static_cast<int>(coarse_weights.size()) != nc)
        throw std::invalid_argument("importance_resample: weight count mismatch");
    if (n_fine < 1) throw std::invalid_argument("importance_resample: need n_fine >= 1");

    double total = 0;
    for (double w : coarse_weights) {
        if (!(w >= 0)) throw std::invalid_argument("importance_resample: negative weight");
        total += w;
    }

    // CDF over coarse intervals; all-zero weights degrade to uniform
    std::vector<double> cdf(nc + 1, 0.0);
    for (int i = 0; i < nc; ++i) {
        const double p = total > 0 ? coarse_weights[i] / total
                                   : coarse.deltas[i] / (coarse.boundaries.back() - coarse.boundaries.front());
        cdf[i + 1] = cdf[i] + p;
    }
    cdf[nc] = 1.0;

    std::vector<double> merged = coarse.boundaries;
    merged.reserve(merged.size() + n_fine);
    for (int j = 0; j < n_fine; ++j) {
        // stratified u so the fine set covers the CDF evenly at any seed
        const double u = (j + uniform01(rng)) / n_fine;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        int k = static_cast<int>(it - cdf.begin()) - 1;
        k = std::clamp(k, 0, nc - 1);
        const double span = cdf[k + 1] - cdf[k];
        const double frac = span > 0 ? (u - cdf[k]) / span : 0.5;
        merged.push_back(coarse.boundaries[k] + frac * coarse.deltas[k]);
    }
    std::sort(merged.begin(), merged.end());
    // drop exact duplicates (possible when a draw lands on a boundary)
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return SampleSet::from_boundaries(std::move(merged));
}

// ---------------------------------------------------------------------------
// Pose file

void write_pose_file(const std::string& path, std::span<const PosedCamera> cameras) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open pose file for writing: " + path);
    out << "# camera-to-world poses, one camera per block:\n"
           "#   image filename\n"
           "#   fx fy cx cy width height\n"
           "#   12 numbers of the 3x4 camera-to-world matrix, row-major\n"
           "# convention: right-handed, camera looks down -z, x right, y up\n";
    out.precision(17);
    for (const auto& cam : cameras) {
        out << cam.image << "\n";
        out << cam.intrinsics.fx << " " << cam.intrinsics.fy << " " << cam.intrinsics.cx << " "
            << cam.intrinsics.cy << " " << cam.intrinsics.width << " " << cam.intrinsics.height
            << "\n";
        for (int i = 0; i < 3; ++i)
            out << cam.pose.r[i][0] << " " << cam.pose.r[i][1] << " " << cam.pose.r[i][2] << " "
                << cam.pose.t[i] << (i == 2 ? "\n" : " ");
    }
    if (!out) throw io_error("failed writing pose file: " + path);
}

std::vector<PosedCamera> read_pose_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open pose file: " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        lines.push_back(line.substr(b, e - b + 1));
    }
    if (lines.size() % 3 != 0)
        throw io_error("pose file " + path + ": expected blocks of 3 non-comment lines");

    std::vector<PosedCamera> cams;
    for (std::size_t i = 0; i < lines.size(); i += 3) {
        PosedCamera cam;
        cam.image = lines[i];
        std::istringstream intr(lines[i + 1]);
        intr >> cam.intrinsics.fx >> cam.intrinsics.fy >> cam.intrinsics.cx >> cam.intrinsics.cy >>
            cam.intrinsics.width >> cam.intrinsics.height;
        if (!intr) throw io_error("pose file " + path + ": bad intrinsics line");
        std::istringstream mat(lines[i + 2]);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) mat >> cam.pose.r[r][c];
            mat >> cam.pose.t[r];
        }
        if (!mat) throw io_error("pose file " + path + ": bad matrix line");
        cam.intrinsics.validate();
        cam.pose.validate();
        cams.push_back(std::move(cam));
    }
    return cams;
}

}  // namespace sfield
