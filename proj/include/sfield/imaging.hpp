// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "sfield/dataset.hpp"
#include "sfield/metrics.hpp"
#include "sfield/trainer.hpp"

namespace sfield {

/// Every product of a full-frame render. `composite` is what the camera
/// would see in the medium; `restored` drops both the attenuation and the
/// backscatter (object radiance under plain volumetric compositing);
/// `object_attenuated` and `backscatter` are the two composite summands.
struct RenderImages {
    Image3 composite;
    Image3 object_attenuated;
    Image3 backscatter;
    Image3 restored;
    Image1 depth;
};

/// Renders one posed view with deterministic sampling (the seed fixes the
/// importance draws). Jitter is forced off so repeated renders are bitwise
/// equal.
RenderImages render_images(const FieldModel& model, const PosedCamera& cam, double t_near,
                           double t_far, const SamplingConfig& sampling, std::uint64_t seed);

/// Per-ray medium coefficients for a full frame: the direction-conditioned
/// backscatter/attenuation densities and medium color at each pixel.
struct MediumMaps {
    Image3 sigma_bs, sigma_attn, color;
};
MediumMaps render_medium_maps(const FieldModel& model, const PosedCamera& cam);

/// Renders the listed views and scores them against the dataset: task
/// "in-medium" compares the composite with the degraded capture, task
/// "restoration" compares the restored image with the clean ground truth.
/// Depth metrics (vs the stored range maps, over hit pixels) ride on both
/// rows. When `images_out` is non-null the rendered frames are appended in
/// view order.
std::vector<MetricsRow> evaluate_views(const FieldModel& model, const Dataset& ds,
                                       std::span<const int> view_indices,
                                       const std::string& run_id, const SamplingConfig& sampling,
                                       std::uint64_t seed, std::vector<RenderImages>* images_out);

}  // namespace sfield
