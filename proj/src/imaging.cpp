// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/imaging.hpp"

namespace sfield {

namespace {

constexpr int kChunkRays = 512;  // keeps the widest trace near 150 MB

}  // namespace

RenderImages render_images(const FieldModel& model, const PosedCamera& cam, double t_near,
                           double t_far, const SamplingConfig& sampling, std::uint64_t seed) {
    cam.intrinsics.validate();
    cam.pose.validate();
    SamplingConfig sc = sampling;
    sc.jitter = false;
    sc.validate();

    const int w = cam.intrinsics.width, h = cam.intrinsics.height;
    RenderImages out;
    out.composite = Image3(w, h);
    out.object_attenuated = Image3(w, h);
    out.backscatter = Image3(w, h);
    out.restored = Image3(w, h);
    out.depth = Image1(w, h);

    RngStream rng(seed);
    const float* params = model.params.data();
    std::vector<Ray> rays;
    std::vector<std::pair<int, int>> pixels;
    SampledRays sr;
    ObjectTrace<float> otr;
    MediumTrace<float> mtr;

    auto flush = [&]() {
        if (rays.empty()) return;
        hierarchical_sample(model, params, rays, sc, rng, sr);
        object_forward(model, params, sr.pos, sr.dir, otr);
        medium_forward(model, params, sr.ray_dir, mtr);

        FieldSamples<float> fs;
        for (std::size_t r = 0; r < rays.size(); ++r) {
            const std::size_t lo = sr.offset[r], hi = sr.offset[r + 1];
            fs.sigma.assign(otr.sigma.begin() + long(lo), otr.sigma.begin() + long(hi));
            fs.color.assign(otr.color.begin() + long(lo), otr.color.begin() + long(hi));
            const RenderOutput<float> ro = render_final(sr.samples[r], fs, mtr.coeffs[r]);

            Rgb<double> restored{0, 0, 0};
            for (std::size_t i = 0; i < fs.sigma.size(); ++i)
                for (int c = 0; c < 3; ++c)
                    restored[c] += double(ro.weights[i]) * double(fs.color[i][c]);

            const auto [x, y] = pixels[r];
            out.composite.set_rgb(x, y, {ro.composite[0], ro.composite[1], ro.composite[2]});
            out.object_attenuated.set_rgb(x, y, {ro.object[0], ro.object[1], ro.object[2]});
            out.backscatter.set_rgb(x, y, {ro.medium[0], ro.medium[1], ro.medium[2]});
            out.restored.set_rgb(x, y, restored);
            out.depth.at(x, y) = ro.depth;
        }
        rays.clear();
        pixels.clear();
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            rays.push_back(generate_ray(cam.intrinsics, cam.pose, x + 0.5, y + 0.5, t_near, t_far));
            pixels.emplace_back(x, y);
            if (int(rays.size()) == kChunkRays) flush();
        }
    }
    flush();
    return out;
}

MediumMaps render_medium_maps(const FieldModel& model, const PosedCamera& cam) {
    cam.intrinsics.validate();
    cam.pose.validate();
    const int w = cam.intrinsics.width, h = cam.intrinsics.height;
    MediumMaps out{Image3(w, h), Image3(w, h), Image3(w, h)};

    std::vector<Vec3> dirs;
    dirs.reserve(std::size_t(w) * std::size_t(h));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            dirs.push_back(
                generate_ray(cam.intrinsics, cam.pose, x + 0.5, y + 0.5, 0.1, 1.0).dir);

    MediumTrace<float> mtr;
    medium_forward(model, model.params.data(), dirs, mtr);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const MediumCoeffs<float>& mc = mtr.coeffs[std::size_t(y) * std::size_t(w) + x];
            out.sigma_bs.set_rgb(x, y, {mc.sigma_bs[0], mc.sigma_bs[1], mc.sigma_bs[2]});
            out.sigma_attn.set_rgb(x, y, {mc.sigma_attn[0], mc.sigma_attn[1], mc.sigma_attn[2]});
            out.color.set_rgb(x, y, {mc.color[0], mc.color[1], mc.color[2]});
        }
    return out;
}

std::vector<MetricsRow> evaluate_views(const FieldModel& model, const Dataset& ds,
                                       std::span<const int> view_indices,
                                       const std::string& run_id, const SamplingConfig& sampling,
                                       std::uint64_t seed, std::vector<RenderImages>* images_out) {
    std::vector<MetricsRow> rows;
    for (int vi : view_indices) {
        const DatasetView& v = ds.views.at(std::size_t(vi));
        RenderImages ri = render_images(model, v.camera, ds.t_near, ds.t_far, sampling,
                                        seed + std::uint64_t(vi));

        Image1 mask(v.depth.width, v.depth.height);
        for (std::size_t i = 0; i < mask.data.size(); ++i)
            mask.data[i] = v.depth.data[i] > 0 ? 1.0 : 0.0;
        const DepthMetrics dm = depth_metrics(ri.depth, v.depth, mask);

        MetricsRow row;
        row.run_id = run_id;
        row.split = v.held_out ? "val" : "train";
        row.view = vi;
        row.depth_rmse = dm.rmse;
        row.depth_absrel = dm.abs_rel;

        row.task = "in-medium";
        row.psnr = psnr(ri.composite, v.degraded);
        row.ssim = ssim(ri.composite, v.degraded);
        rows.push_back(row);

        row.task = "restoration";
        row.psnr = psnr(ri.restored, v.clean);
        row.ssim = ssim(ri.restored, v.clean);
        rows.push_back(row);

        if (images_out) images_out->push_back(std::move(ri));
    }
    return rows;
}

}  // namespace sfield
