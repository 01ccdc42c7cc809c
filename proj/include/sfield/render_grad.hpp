// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "sfield/render.hpp"

namespace sfield {

/// Gradients of render_final with respect to its raw per-ray inputs.
template <class T>
struct RenderFinalGrad {
    std::vector<T> d_sigma;        // per interval
    std::vector<Rgb<T>> d_color;   // per interval
    Rgb<T> d_c_med{}, d_sigma_bs{}, d_sigma_attn{};
};

/// Hand-derived reverse pass of render_final. `d_composite` is dL/dC_hat;
/// `d_t_obj` (optional, may be empty) is the direct dL/dT^obj_i path used by
/// the transmittance prior. Outputs are overwritten, not accumulated. The
/// depth/weight outputs carry no gradient; only the composite and the
/// per-interval object transmittance are differentiated.
template <class T>
void render_final_backward(const SampleSet& samples, const FieldSamples<T>& field,
                           const MediumCoeffs<T>& med, const RenderOutput<T>& fwd,
                           const Rgb<T>& d_composite, std::span<const T> d_t_obj,
                           RenderFinalGrad<T>& g) {
    const std::size_t n = samples.deltas.size();
    if (!d_t_obj.empty() && d_t_obj.size() != n)
        throw std::invalid_argument("render_final_backward: d_t_obj length mismatch");
    g.d_sigma.assign(n, T(0));
    g.d_color.assign(n, Rgb<T>{0, 0, 0});
    Rgb<double> d_cmed{0, 0, 0}, d_bs{0, 0, 0}, d_attn{0, 0, 0};

    // dL/dT_i collected per interval, then folded into d_sigma with the
    // suffix-sum identity dsigma_j -= delta_j * sum_{i>j} dT_i T_i.
    std::vector<double> d_t(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double delta = samples.deltas[i];
        const double s = samples.boundaries[i];
        const double t_obj = double(fwd.transmittance[i]);
        const double edelta = std::exp(-double(field.sigma[i]) * delta);
        const double alpha = -std::expm1(-double(field.sigma[i]) * delta);
        if (!d_t_obj.empty()) d_t[i] += double(d_t_obj[i]);
        double d_sigma_direct = 0;
        for (int c = 0; c < 3; ++c) {
            const double go = double(d_composite[c]);
            const double a_att = clamped_exp(-double(med.sigma_attn[c]) * s);
            const double b_bs = clamped_exp(-double(med.sigma_bs[c]) * s);
            const double ebs = std::exp(-double(med.sigma_bs[c]) * delta);
            const double beta = -std::expm1(-double(med.sigma_bs[c]) * delta);
            const double col = double(field.color[i][c]);
            const double cm = double(med.color[c]);

            g.d_color[i][c] = T(go * t_obj * alpha * a_att);
            d_sigma_direct += go * t_obj * a_att * col * delta * edelta;
            d_t[i] += go * (alpha * a_att * col + b_bs * beta * cm);
            d_attn[c] += go * t_obj * alpha * col * a_att * -s;
            d_bs[c] += go * t_obj * cm * (b_bs * -s * beta + b_bs * delta * ebs);
            d_cmed[c] += go * t_obj * b_bs * beta;
        }
        g.d_sigma[i] = T(d_sigma_direct);
    }

    double suffix = 0;
    for (std::size_t j = n; j-- > 0;) {
        g.d_sigma[j] -= T(samples.deltas[j] * suffix);
        suffix += d_t[j] * double(fwd.transmittance[j]);
    }

    for (int c = 0; c < 3; ++c) {
        g.d_c_med[c] = T(d_cmed[c]);
        g.d_sigma_bs[c] = T(d_bs[c]);
        g.d_sigma_attn[c] = T(d_attn[c]);
    }
}

/// Gradients of render_basic with respect to its raw per-ray inputs.
template <class T>
struct RenderBasicGrad {
    std::vector<T> d_sigma;             // per interval
    std::vector<Rgb<T>> d_color;        // per interval
    std::vector<Rgb<T>> d_med_sigma;    // per interval, per channel
    std::vector<Rgb<T>> d_med_color;    // per interval, per channel
};

/// Hand-derived reverse pass of render_basic (the shared-opacity model where
/// object and medium densities add inside one alpha). The combined
/// transmittance is recomputed per channel during the sweep; the reported
/// object-only transmittance gradient (`d_t_obj`) folds in exactly as for
/// render_final. Outputs are overwritten, not accumulated.
template <class T>
void render_basic_backward(const SampleSet& samples, const FieldSamples<T>& field,
                           const PerSampleMedium<T>& med, const RenderOutput<T>& fwd,
                           const Rgb<T>& d_composite, std::span<const T> d_t_obj,
                           RenderBasicGrad<T>& g) {
    const std::size_t n = samples.deltas.size();
    if (med.sigma.size() != n || med.color.size() != n)
        throw std::invalid_argument("render_basic_backward: medium length mismatch");
    if (!d_t_obj.empty() && d_t_obj.size() != n)
        throw std::invalid_argument("render_basic_backward: d_t_obj length mismatch");
    g.d_sigma.assign(n, T(0));
    g.d_color.assign(n, Rgb<T>{0, 0, 0});
    g.d_med_sigma.assign(n, Rgb<T>{0, 0, 0});
    g.d_med_color.assign(n, Rgb<T>{0, 0, 0});

    std::vector<double> dsig(n, 0.0);
    std::vector<double> term(n);  // weighted composite contribution, one channel
    for (int c = 0; c < 3; ++c) {
        const double go = double(d_composite[c]);
        double accum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = samples.deltas[i];
            const double so = double(field.sigma[i]);
            const double sm = double(med.sigma[i][c]);
            const double denom = so + sm;
            const double t_comb = clamped_exp(-accum);
            if (denom > 0) {
                const double e = std::exp(-denom * delta);
                const double big_e = -std::expm1(-denom * delta);
                const double co = double(field.color[i][c]);
                const double cm = double(med.color[i][c]);
                const double mix = (so * co + sm * cm) / denom;
                term[i] = go * t_comb * big_e * mix;
                dsig[i] += go * t_comb * (delta * e * mix + big_e * (co - mix) / denom);
                g.d_med_sigma[i][c] =
                    T(go * t_comb * (delta * e * mix + big_e * (cm - mix) / denom));
                g.d_color[i][c] = T(go * t_comb * big_e * so / denom);
                g.d_med_color[i][c] = T(go * t_comb * big_e * sm / denom);
            } else {
                term[i] = 0;  // the forward's guarded-zero interval
            }
            accum += denom * delta;
        }
        // both densities advance the shared accumulator, so both collect the
        // same per-channel suffix
        double suffix = 0;
        for (std::size_t j = n; j-- > 0;) {
            dsig[j] -= samples.deltas[j] * suffix;
            g.d_med_sigma[j][c] = T(double(g.d_med_sigma[j][c]) - samples.deltas[j] * suffix);
            suffix += term[j];
        }
    }

    if (!d_t_obj.empty()) {
        double suffix = 0;
        for (std::size_t j = n; j-- > 0;) {
            dsig[j] -= samples.deltas[j] * suffix;
            suffix += double(d_t_obj[j]) * double(fwd.transmittance[j]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) g.d_sigma[i] = T(dsig[i]);
}

}  // namespace sfield
