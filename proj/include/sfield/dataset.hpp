// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfield/scene.hpp"

namespace sfield {

/// Forward-facing arc of cameras looking at a common target.
struct TrajectoryConfig {
    int n_train = 12, n_val = 3;
    double distance = 1.05;  // camera distance from the target (m)
    double span_deg = 34;    // full angular span of the arc
    double jitter = 0.05;    // uniform positional jitter per axis (m)
    Vec3 target{0, 0, -1};
    double t_near = 0.1, t_far = 2.6;

    void validate() const;
};

enum class MediumKind { kNone, kUnderwater, kFog };

/// What the simulator puts between the scene and the cameras.
struct MediumSpec {
    MediumKind kind = MediumKind::kNone;
    FormationParams water;    // kUnderwater
    double fog_beta = 1.2;    // kFog
    Rgb<double> airlight{1, 1, 1};

    void validate() const;

    static MediumSpec none();
    /// Wideband reference coefficients: beta_D (1.3, 1.2, 0.9),
    /// beta_B (0.95, 0.85, 0.7), B_inf (0.07, 0.2, 0.39).
    static MediumSpec underwater_preset();
    /// Wavelength-flat haze: beta 1.2, white airlight.
    static MediumSpec fog_preset();
};

struct DatasetView {
    PosedCamera camera;  // image name, intrinsics, camera-to-world pose
    Image3 clean, degraded;
    Image1 depth;
    bool held_out = false;
};

struct Dataset {
    std::vector<DatasetView> views;
    MediumSpec medium;
    std::uint64_t seed = 0;
    double t_near = 0, t_far = 0;
    std::string content_hash;  // FNV-1a over image payloads, poses, medium

    std::vector<int> train_indices() const;
    std::vector<int> val_indices() const;
    /// Index of the view whose direction is closest to the arc center.
    int central_view() const;
};

/// Renders every view, quantizes clean/depth through f32, then applies the
/// medium to the quantized data so the stored degraded images are exactly
/// reproducible from the stored clean + depth. Held-out views are spread
/// evenly across the arc.
Dataset build_dataset(const AnalyticScene& scene, const CameraIntrinsics& intr,
                      const TrajectoryConfig& traj, const MediumSpec& medium, std::uint64_t seed);

/// Layout: clean/NNN.pfm, degraded/NNN.pfm, depth/NNN.pfm, poses.txt,
/// medium.txt, manifest.txt. Refuses to write into an existing nonempty
/// directory unless `force`.
void write_dataset(const std::string& dir, const Dataset& ds, bool force);
Dataset load_dataset(const std::string& dir);

/// Serialized medium description (the medium.txt payload).
std::string medium_to_text(const MediumSpec& m);
MediumSpec medium_from_text(const std::string& text);

}  // namespace sfield
