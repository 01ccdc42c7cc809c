// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sfield/common.hpp"
#include "sfield/geometry.hpp"

namespace sfield {

// ---------------------------------------------------------------------------
// Per-ray rendering inputs/outputs. Everything is templated on the scalar
// type: float for the training path, double for oracles and gradient checks.

/// Object field evaluated once per interval: scalar density (channel-shared)
/// and RGB emitted color.
template <class T>
struct FieldSamples {
    std::vector<T> sigma;      // >= 0, 1/m
    std::vector<Rgb<T>> color; // in [0,1]
};

/// Medium evaluated per interval (the general form, before the per-ray
/// constancy constraint). Densities are per color channel.
template <class T>
struct PerSampleMedium {
    std::vector<Rgb<T>> sigma;
    std::vector<Rgb<T>> color;
};

enum class MediumMode { kOneParam, kThreeParam, kSixParam };

/// Per-ray medium description of the final model: medium color plus separate
/// backscatter and attenuation densities per channel (up to 6 free densities;
/// the mode records how many are actually independent).
template <class T>
struct MediumCoeffs {
    Rgb<T> color{};       // c^med, in [0,1]
    Rgb<T> sigma_bs{};    // per channel, >= 0
    Rgb<T> sigma_attn{};  // per channel, >= 0
    MediumMode mode = MediumMode::kSixParam;

    void validate() const;
};

template <class T>
struct RenderOutput {
    Rgb<T> composite{};          // C_hat = object + medium, exactly
    Rgb<T> object{};             // direct object component
    Rgb<T> medium{};             // backscatter component
    std::vector<T> weights;      // object weight per interval
    std::vector<T> transmittance;// object transmittance at interval starts
    T depth{};                   // expected ray depth (m)
    T acc{};                     // sum of object weights
};

// ---------------------------------------------------------------------------

/// depth = sum(w_i * midpoint_i) / sum(w_i) when the weights accumulate more
/// than 1e-3, else the far bound.
template <class T>
T expected_depth(std::span<const T> weights, const SampleSet& samples) {
    if (weights.size() != samples.deltas.size())
        throw std::invalid_argument("expected_depth: weight count mismatch");
    double wsum = 0, msum = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= T(0))) throw std::invalid_argument("expected_depth: negative weight");
        wsum += double(weights[i]);
        msum += double(weights[i]) * samples.midpoints[i];
    }
    if (wsum > 1e-3) return T(msum / wsum);
    return T(samples.boundaries.back());
}

/// Object-only transmittance at the start of each interval: T_0 = 1,
/// T_i = exp(-sum_{j<i} sigma_j * delta_j). Nonincreasing.
template <class T>
std::vector<T> object_transmittance(const SampleSet& samples, const FieldSamples<T>& field) {
    const std::size_t n = samples.deltas.size();
    if (field.sigma.size() != n || field.color.size() != n)
        throw std::invalid_argument("object_transmittance: length mismatch");
    std::vector<T> t(n);
    double accum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(field.sigma[i] >= T(0)) || !std::isfinite(double(field.sigma[i])))
            throw std::invalid_argument("object density must be finite and nonnegative");
        t[i] = clamped_exp(T(-accum));
        accum += double(field.sigma[i]) * samples.deltas[i];
    }
    return t;
}

namespace detail {

template <class T>
void finish_output(RenderOutput<T>& out, const SampleSet& samples, const Rgb<double>& obj,
                   const Rgb<double>& med) {
    double acc = 0;
    for (T w : out.weights) acc += double(w);
    out.acc = T(acc);
    for (int c = 0; c < 3; ++c) {
        out.object[c] = T(obj[c]);
        out.medium[c] = T(med[c]);
        out.composite[c] = out.object[c] + out.medium[c];
    }
    out.depth = expected_depth<T>(out.weights, samples);
}

}  // namespace detail

/// Clear-air quadrature compositing: C = sum_i T_i (1 - e^{-sigma_i delta_i}) c_i.
/// The medium component of the output is identically zero.
template <class T>
RenderOutput<T> vanilla_render(const SampleSet& samples, const FieldSamples<T>& field) {
    const std::size_t n = samples.deltas.size();
    RenderOutput<T> out;
    out.transmittance = object_transmittance(samples, field);
    out.weights.resize(n);
    Rgb<double> obj{0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const T opacity = T(-std::expm1(-double(field.sigma[i]) * samples.deltas[i]));
        out.weights[i] = out.transmittance[i] * opacity;
        for (int c = 0; c < 3; ++c) obj[c] += double(out.weights[i]) * double(field.color[i][c]);
    }
    detail::finish_output(out, samples, obj, {0, 0, 0});
    return out;
}

/// Compositing with a per-interval medium. Per channel, each interval
/// contributes T_i (1 - e^{-(so+sm) delta}) (so*c_obj + sm*c_med)/(so+sm) with
/// the combined transmittance in T_i; a zero-density interval contributes
/// exactly zero (guarded ratio). The reported weights/transmittance and depth
/// use the object-only quantities.
template <class T>
RenderOutput<T> render_basic(const SampleSet& samples, const FieldSamples<T>& field,
                             const PerSampleMedium<T>& med) {
    const std::size_t n = samples.deltas.size();
    if (med.sigma.size() != n || med.color.size() != n)
        throw std::invalid_argument("render_basic: medium length mismatch");
    RenderOutput<T> out;
    out.transmittance = object_transmittance(samples, field);
    out.weights.resize(n);
    Rgb<double> obj{0, 0, 0}, bs{0, 0, 0};
    for (int c = 0; c < 3; ++c) {
        double accum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sm = double(med.sigma[i][c]);
            if (!(sm >= 0) || !std::isfinite(sm))
                throw std::invalid_argument("medium density must be finite and nonnegative");
            const double so = double(field.sigma[i]);
            const double denom = so + sm;
            const double t_combined = clamped_exp(-accum);
            const double common = t_combined * -std::expm1(-denom * samples.deltas[i]);
            if (denom > 0) {
                obj[c] += common * so * double(field.color[i][c]) / denom;
                bs[c] += common * sm * double(med.color[i][c]) / denom;
            }
            accum += denom * samples.deltas[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        out.weights[i] = out.transmittance[i] * T(-std::expm1(-double(field.sigma[i]) * samples.deltas[i]));
    detail::finish_output(out, samples, obj, bs);
    return out;
}

/// Per-ray-constant medium with the opaque-object simplification:
///   C_obj_i = T_i (1 - e^{-sigma_i delta_i}) c_i,
///   C_med_i = T_i (1 - e^{-sigma_med delta_i}) c_med,
///   T_i = exp(-sum_{j<i} sigma_j delta_j) * exp(-sigma_med s_i).
template <class T>
RenderOutput<T> render_simplified(const SampleSet& samples, const FieldSamples<T>& field,
                                  const Rgb<T>& sigma_med, const Rgb<T>& c_med) {
    const std::size_t n = samples.deltas.size();
    RenderOutput<T> out;
    out.transmittance = object_transmittance(samples, field);
    out.weights.resize(n);
    Rgb<double> obj{0, 0, 0}, bs{0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const T opacity = T(-std::expm1(-double(field.sigma[i]) * samples.deltas[i]));
        out.weights[i] = out.transmittance[i] * opacity;
        const double s = samples.boundaries[i];
        for (int c = 0; c < 3; ++c) {
            const double sm = double(sigma_med[c]);
            if (!(sm >= 0)) throw std::invalid_argument("medium density must be nonnegative");
            const double t_i = double(out.transmittance[i]) * clamped_exp(-sm * s);
            obj[c] += t_i * double(opacity) * double(field.color[i][c]);
            bs[c] += t_i * -std::expm1(-sm * samples.deltas[i]) * double(c_med[c]);
        }
    }
    detail::finish_output(out, samples, obj, bs);
    return out;
}

/// Final model with separate attenuation/backscatter densities:
///   C_obj_i = T^obj_i e^{-sigma_attn s_i} (1 - e^{-sigma_i delta_i}) c_i,
///   C_med_i = T^obj_i e^{-sigma_bs s_i} (1 - e^{-sigma_bs delta_i}) c_med,
/// where s_i is the interval's left boundary.
template <class T>
RenderOutput<T> render_final(const SampleSet& samples, const FieldSamples<T>& field,
                             const MediumCoeffs<T>& med) {
    med.validate();
    const std::size_t n = samples.deltas.size();
    RenderOutput<T> out;
    out.transmittance = object_transmittance(samples, field);
    out.weights.resize(n);
    Rgb<double> obj{0, 0, 0}, bs{0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const T opacity = T(-std::expm1(-double(field.sigma[i]) * samples.deltas[i]));
        out.weights[i] = out.transmittance[i] * opacity;
        const double s = samples.boundaries[i];
        const double t_obj = double(out.transmittance[i]);
        for (int c = 0; c < 3; ++c) {
            obj[c] += t_obj * clamped_exp(-double(med.sigma_attn[c]) * s) * double(opacity) *
                      double(field.color[i][c]);
            bs[c] += t_obj * clamped_exp(-double(med.sigma_bs[c]) * s) *
                     -std::expm1(-double(med.sigma_bs[c]) * samples.deltas[i]) *
                     double(med.color[c]);
        }
    }
    detail::finish_output(out, samples, obj, bs);
    return out;
}

// ---------------------------------------------------------------------------

template <class T>
void MediumCoeffs<T>::validate() const {
    for (int c = 0; c < 3; ++c) {
        if (!(color[c] >= T(0) && color[c] <= T(1)))
            throw std::invalid_argument("medium color must lie in [0,1]");
        if (!(sigma_bs[c] >= T(0)) || !(sigma_attn[c] >= T(0)))
            throw std::invalid_argument("medium densities must be nonnegative");
    }
    if (mode == MediumMode::kThreeParam || mode == MediumMode::kOneParam) {
        for (int c = 0; c < 3; ++c)
            if (sigma_bs[c] != sigma_attn[c])
                throw std::invalid_argument("tied medium mode requires sigma_bs == sigma_attn");
    }
    if (mode == MediumMode::kOneParam) {
        for (int c = 1; c < 3; ++c)
            if (sigma_bs[c] != sigma_bs[0])
                throw std::invalid_argument("one-parameter mode requires equal channels");
    }
}

}  // namespace sfield
