// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "sfield/common.hpp"

namespace sfield {

/// Pinhole intrinsics in pixel units.
struct CameraIntrinsics {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    void validate() const;
};

/// Camera-to-world rigid transform. Convention: right-handed, camera looks
/// down -z in its own frame, x right, y up. World units are meters.
struct Pose {
    double r[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};  // rotation, row-major
    Vec3 t;                                              // camera center in world

    Vec3 rotate(const Vec3& v) const {
        return {r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
                r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
                r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z};
    }
    Vec3 to_world(const Vec3& p) const { return rotate(p) + t; }

    /// Checks orthonormality and det = +1 to 1e-6.
    void validate() const;

    /// Camera placed at `eye` looking at `target` with the given up hint.
    static Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up);
};

struct Ray {
    Vec3 origin;
    Vec3 dir;  // unit norm
    double t_near = 0, t_far = 0;

    Vec3 at(double t) const { return origin + dir * t; }
};

/// A strictly increasing partition of [t_near, t_far] into N intervals.
/// boundaries has N+1 entries; deltas and midpoints have N.
struct SampleSet {
    std::vector<double> boundaries;
    std::vector<double> deltas;
    std::vector<double> midpoints;

    int interval_count() const { return static_cast<int>(deltas.size()); }

    /// Builds deltas/midpoints from boundaries and enforces the partition
    /// invariants (strict increase, finite, positive deltas).
    static SampleSet from_boundaries(std::vector<double> boundaries);
};

/// Ray through the pixel coordinate `(px, py)` (continuous; pass i+0.5 for the
/// center of pixel i). Direction is normalized after the world transform.
Ray generate_ray(const CameraIntrinsics& intr, const Pose& pose, double px, double py,
                 double t_near, double t_far);

/// Partitions [t_near, t_far] into n intervals. With jitter, each interior
/// boundary is drawn uniformly within its own bin so the partition stays
/// strictly increasing; the endpoints are always exact. The final interval is
/// finite by construction.
SampleSet stratified_sample(const Ray& ray, int n, bool jitter, RngStream& rng);

/// Inverse-CDF draws from the piecewise-constant distribution given by
/// `coarse_weights` over the coarse intervals, merged and sorted with the
/// coarse boundaries into a finer partition. All-zero weights fall back to a
/// uniform distribution.
SampleSet importance_resample(const SampleSet& coarse, std::span<const double> coarse_weights,
                              int n_fine, RngStream& rng);

// ---------------------------------------------------------------------------
// Pose file: one camera per block -- image filename; fx fy cx cy width height;
// 12 numbers of the 3x4 camera-to-world matrix, row-major. '#' comments.

struct PosedCamera {
    std::string image;
    CameraIntrinsics intrinsics;
    Pose pose;
};

void write_pose_file(const std::string& path, std::span<const PosedCamera> cameras);
std::vector<PosedCamera> read_pose_file(const std::string& path);

}  // namespace sfield
