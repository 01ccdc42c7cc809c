// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "sfield/dataset.hpp"
#include "sfield/field.hpp"
#include "sfield/losses.hpp"
#include "sfield/optim.hpp"
#include "sfield/render_grad.hpp"

namespace sfield {

/// Coarse-to-fine ray sampling. The fine pass evaluates the merged partition
/// (coarse boundaries plus importance draws), so every ray ends up with
/// n_coarse + n_fine intervals.
struct SamplingConfig {
    int n_coarse = 64;
    int n_fine = 32;
    bool jitter = true;  // stratified jitter during training; off for eval

    void validate() const {
        if (n_coarse < 2 || n_fine < 0) throw config_error("sampling: need n_coarse >= 2, n_fine >= 0");
    }
};

/// A batch of rays after hierarchical sampling, flattened for batched network
/// evaluation. Ray r owns flat indices [offset[r], offset[r+1]).
struct SampledRays {
    std::vector<SampleSet> samples;
    std::vector<std::size_t> offset;  // size rays + 1
    std::vector<Vec3> pos;            // interval midpoints, flattened
    std::vector<Vec3> dir;            // ray direction repeated per interval
    std::vector<Vec3> ray_dir;        // one per ray

    /// Per-ray medium switch (empty means all on). Rays whose capture pixel
    /// was passed through undegraded (depth sentinel 0) are fitted with the
    /// object-only model: zero medium coefficients, no medium-head gradient.
    std::vector<std::uint8_t> medium_on;

    std::size_t ray_count() const { return samples.size(); }
    std::size_t sample_count() const { return pos.size(); }
};

namespace detail {

inline std::size_t uniform_index(RngStream& rng, std::size_t n) {
    const std::size_t i = std::size_t(uniform01(rng) * double(n));
    return i < n ? i : n - 1;
}

/// Object-only weights T_i alpha_i from densities alone (no medium terms);
/// this is what drives importance resampling.
inline void density_weights(const SampleSet& ss, const double* sigma_begin,
                            std::vector<double>& w) {
    const std::size_t n = ss.deltas.size();
    w.resize(n);
    double accum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sd = sigma_begin[i] * ss.deltas[i];
        w[i] = std::exp(-accum) * -std::expm1(-sd);
        accum += sd;
    }
}

}  // namespace detail

/// Stratified coarse pass, density-only evaluation, then importance
/// resampling. Consumes the rng in ray order twice (stratification, then
/// resampling), so the draw sequence is reproducible for a fixed batch.
/// Sample positions are treated as data by the training step: no gradient
/// flows through the resampling.
template <class T>
void hierarchical_sample(const FieldModel& m, const T* params, std::span<const Ray> rays,
                         const SamplingConfig& sc, RngStream& rng, SampledRays& out) {
    sc.validate();
    const std::size_t nr = rays.size();
    std::vector<SampleSet> coarse(nr);
    std::vector<Vec3> cpos;
    cpos.reserve(nr * std::size_t(sc.n_coarse));
    for (std::size_t r = 0; r < nr; ++r) {
        coarse[r] = stratified_sample(rays[r], sc.n_coarse, sc.jitter, rng);
        for (double t : coarse[r].midpoints) cpos.push_back(rays[r].at(t));
    }

    std::vector<T> sigma;
    object_density(m, params, cpos, sigma);
    std::vector<double> sigma_d(sigma.begin(), sigma.end());

    out.samples.resize(nr);
    out.offset.assign(1, 0);
    out.pos.clear();
    out.dir.clear();
    out.ray_dir.clear();
    out.medium_on.clear();
    std::vector<double> w;
    for (std::size_t r = 0; r < nr; ++r) {
        detail::density_weights(coarse[r], sigma_d.data() + r * std::size_t(sc.n_coarse), w);
        out.samples[r] = sc.n_fine > 0
                             ? importance_resample(coarse[r], w, sc.n_fine, rng)
                             : std::move(coarse[r]);
        for (double t : out.samples[r].midpoints) {
            out.pos.push_back(rays[r].at(t));
            out.dir.push_back(rays[r].dir);
        }
        out.offset.push_back(out.pos.size());
        out.ray_dir.push_back(rays[r].dir);
    }
}

/// Loss (and, when `grad` is non-null, accumulated parameter gradients) of
/// the full medium-aware rendering model over pre-sampled rays. Works in f32
/// for training and f64 for finite-difference verification; the samples stay
/// fixed either way, matching the stop-gradient around resampling.
///
/// `detached_c` pins the reconstruction denominators to base-point
/// predictions (see recon_loss); finite-difference checks evaluate the
/// objective with the base run's predictions so the stop-gradient stays a
/// constant under perturbation. `c_hat_out`, when non-null, receives the
/// per-ray composite predictions of this evaluation.
template <class T>
LossBreakdown sampled_loss_grad(const FieldModel& m, const T* params, const SampledRays& sr,
                                std::span<const Rgb<double>> targets, const LossWeights& lw,
                                T* grad, std::span<const Rgb<T>> detached_c = {},
                                std::vector<Rgb<T>>* c_hat_out = nullptr) {
    const std::size_t nr = sr.ray_count();
    if (targets.size() != nr) throw std::invalid_argument("sampled_loss_grad: target mismatch");
    if (nr == 0) throw std::invalid_argument("sampled_loss_grad: empty batch");
    if (!sr.medium_on.empty() && sr.medium_on.size() != nr)
        throw std::invalid_argument("sampled_loss_grad: medium mask mismatch");
    auto ray_medium = [&](std::size_t r) { return sr.medium_on.empty() || sr.medium_on[r]; };

    ObjectTrace<T> otr;
    object_forward(m, params, sr.pos, sr.dir, otr);
    MediumTrace<T> mtr;
    medium_forward(m, params, sr.ray_dir, mtr);

    std::vector<MediumCoeffs<T>> med(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        if (ray_medium(r)) med[r] = mtr.coeffs[r];
        else med[r].mode = mtr.coeffs[r].mode;  // zero coefficients: object-only render
    }

    std::vector<RenderOutput<T>> outs(nr);
    std::vector<FieldSamples<T>> fields(nr);
    std::vector<Rgb<T>> c_hat(nr), c_star(nr);
    std::vector<T> t_obj;
    t_obj.reserve(sr.sample_count());
    for (std::size_t r = 0; r < nr; ++r) {
        const std::size_t lo = sr.offset[r], hi = sr.offset[r + 1];
        fields[r].sigma.assign(otr.sigma.begin() + long(lo), otr.sigma.begin() + long(hi));
        fields[r].color.assign(otr.color.begin() + long(lo), otr.color.begin() + long(hi));
        outs[r] = render_final(sr.samples[r], fields[r], med[r]);
        c_hat[r] = outs[r].composite;
        for (int c = 0; c < 3; ++c) c_star[r][c] = T(targets[r][c]);
        t_obj.insert(t_obj.end(), outs[r].transmittance.begin(), outs[r].transmittance.end());
    }

    std::vector<Rgb<T>> d_c_hat;
    std::vector<T> d_t;
    LossBreakdown lb = total_loss<T>(c_hat, c_star, t_obj, lw, grad ? &d_c_hat : nullptr,
                                     grad ? &d_t : nullptr, detached_c);
    if (c_hat_out) *c_hat_out = c_hat;
    if (!grad) return lb;

    std::vector<T> dsigma(sr.sample_count(), T(0));
    std::vector<Rgb<T>> dcolor(sr.sample_count(), Rgb<T>{0, 0, 0});
    std::vector<Rgb<T>> d_cmed(nr), d_bs(nr), d_attn(nr);
    RenderFinalGrad<T> g;
    for (std::size_t r = 0; r < nr; ++r) {
        const std::size_t lo = sr.offset[r], hi = sr.offset[r + 1];
        render_final_backward(sr.samples[r], fields[r], med[r], outs[r], d_c_hat[r],
                              std::span<const T>(d_t).subspan(lo, hi - lo), g);
        std::copy(g.d_sigma.begin(), g.d_sigma.end(), dsigma.begin() + long(lo));
        std::copy(g.d_color.begin(), g.d_color.end(), dcolor.begin() + long(lo));
        if (ray_medium(r)) {
            d_cmed[r] = g.d_c_med;
            d_bs[r] = g.d_sigma_bs;
            d_attn[r] = g.d_sigma_attn;
        } else {
            // the zeroed coefficients were constants, not medium-head outputs
            d_cmed[r] = d_bs[r] = d_attn[r] = Rgb<T>{0, 0, 0};
        }
    }
    object_backward(m, params, otr, dsigma, dcolor, grad);
    medium_backward(m, params, mtr, d_cmed, d_bs, d_attn, grad);
    return lb;
}

// ---------------------------------------------------------------------------

struct TrainConfig {
    SamplingConfig sampling;
    LossWeights loss;
    OptimConfig optim;
    int batch_rays = 512;
    std::uint64_t seed = 0;
    int log_every = 200;
    int max_consecutive_skips = 50;  // non-finite steps tolerated before aborting

    void validate() const;
};

struct TrainResult {
    int iters = 0;
    int skipped = 0;
    bool diverged = false;       // aborted after repeated non-finite steps
    LossBreakdown last_loss;
    double tail_mean_total = 0;  // mean total loss over the last 100 iterations
};

/// Full training loop over the dataset's training views: random pixel
/// batches, hierarchical sampling, Adam with warmup + log-linear decay.
/// Deterministic for a fixed dataset, config, and seed. Progress lines go to
/// `log` when non-null.
TrainResult train_field(FieldModel& model, const Dataset& ds, const TrainConfig& tc,
                        std::ostream* log);

}  // namespace sfield
