// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/formation.hpp"

#include <cmath>
#include <stdexcept>

#include "sfield/render.hpp"

namespace sfield {

void FormationParams::validate() const {
    for (int c = 0; c < 3; ++c) {
        if (!(beta_d[c] >= 0.0) || !std::isfinite(beta_d[c]))
            throw config_error("formation: beta_D must be finite and >= 0");
        if (!(beta_b[c] >= 0.0) || !std::isfinite(beta_b[c]))
            throw config_error("formation: beta_B must be finite and >= 0");
        if (!(b_inf[c] >= 0.0) || !std::isfinite(b_inf[c]))
            throw config_error("formation: B_inf must be finite and >= 0");
    }
}

Image3 apply_medium(const RGBDImage& clean, const FormationParams& p) {
    p.validate();
    if (clean.rgb.width != clean.depth.width || clean.rgb.height != clean.depth.height)
        throw std::invalid_argument("apply_medium: rgb/depth size mismatch");
    Image3 out(clean.rgb.width, clean.rgb.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double z = clean.depth.at(x, y);
            auto j = clean.rgb.rgb(x, y);
            if (z == 0.0) {  // invalid-depth sentinel: no medium applied
                out.set_rgb(x, y, j);
                continue;
            }
            if (z < 0.0 || !std::isfinite(z))
                throw std::invalid_argument("apply_medium: negative or non-finite depth");
            Rgb<double> i;
            for (int c = 0; c < 3; ++c) {
                i[c] = j[c] * std::exp(-p.beta_d[c] * z) +
                       p.b_inf[c] * (-std::expm1(-p.beta_b[c] * z));
            }
            out.set_rgb(x, y, i);
        }
    }
    return out;
}

Image3 apply_fog(const RGBDImage& clean, double beta, const Rgb<double>& airlight) {
    FormationParams p;
    p.beta_d = rgb_const(beta);
    p.beta_b = rgb_const(beta);
    p.b_inf = airlight;
    return apply_medium(clean, p);
}

Image3 invert_medium(const Image3& degraded, const Image1& depth, const FormationParams& p) {
    p.validate();
    if (degraded.width != depth.width || degraded.height != depth.height)
        throw std::invalid_argument("invert_medium: rgb/depth size mismatch");
    Image3 out(degraded.width, degraded.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double z = depth.at(x, y);
            auto i = degraded.rgb(x, y);
            if (z == 0.0) {
                out.set_rgb(x, y, i);
                continue;
            }
            if (z < 0.0 || !std::isfinite(z))
                throw std::invalid_argument("invert_medium: negative or non-finite depth");
            Rgb<double> j;
            for (int c = 0; c < 3; ++c) {
                const double backscatter = p.b_inf[c] * (-std::expm1(-p.beta_b[c] * z));
                j[c] = (i[c] - backscatter) * std::exp(p.beta_d[c] * z);
            }
            out.set_rgb(x, y, j);
        }
    }
    return out;
}

Rgb<double> closed_form_single_object(const Rgb<double>& c_obj, const Rgb<double>& c_med,
                                      const Rgb<double>& sigma_med, double z) {
    Rgb<double> out;
    for (int c = 0; c < 3; ++c) {
        const double t = std::exp(-sigma_med[c] * z);
        out[c] = t * c_obj[c] + (1.0 - t) * c_med[c];
    }
    return out;
}

double reduction_residual(double delta, double sigma_obj_peak, const Rgb<double>& sigma_med,
                          const Rgb<double>& c_med, const Rgb<double>& c_obj, double z) {
    if (!(delta > 0.0)) throw std::invalid_argument("reduction_residual: delta must be > 0");
    const double k_real = z / delta;
    const long k = std::lround(k_real);
    if (k < 1 || std::abs(k_real - static_cast<double>(k)) > 1e-9)
        throw std::invalid_argument("reduction_residual: z must be a positive multiple of delta");

    // k empty intervals in front of the object, then one interval holding it.
    const std::size_t n = static_cast<std::size_t>(k) + 1;
    std::vector<double> boundaries(n + 1);
    for (std::size_t i = 0; i <= n; ++i) boundaries[i] = static_cast<double>(i) * delta;
    SampleSet samples = SampleSet::from_boundaries(std::move(boundaries));

    FieldSamples<double> field;
    field.sigma.assign(n, 0.0);
    field.sigma.back() = sigma_obj_peak;
    field.color.assign(n, c_obj);

    RenderOutput<double> r = render_simplified(samples, field, sigma_med, c_med);
    Rgb<double> exact = closed_form_single_object(c_obj, c_med, sigma_med, z);
    double residual = 0.0;
    for (int c = 0; c < 3; ++c) residual = std::max(residual, std::abs(r.composite[c] - exact[c]));
    return residual;
}

}  // namespace sfield
