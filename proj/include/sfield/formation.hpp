// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sfield/common.hpp"
#include "sfield/image.hpp"

namespace sfield {

/// Wideband medium coefficients of the closed-form scattering image model:
/// attenuation beta_D, backscatter beta_B, and the backscatter color at
/// infinity B_inf.
struct FormationParams {
    Rgb<double> beta_d{};
    Rgb<double> beta_b{};
    Rgb<double> b_inf{};

    void validate() const;
};

/// Linear RGB plus per-pixel range (distance along the line of sight, m).
/// Depth 0 is the invalid-pixel sentinel (no object hit).
struct RGBDImage {
    Image3 rgb;
    Image1 depth;
};

/// Degrades a clean capture:
///   I = J e^{-beta_D z} + B_inf (1 - e^{-beta_B z})   per pixel, per channel.
/// Invalid-depth pixels pass through unchanged.
Image3 apply_medium(const RGBDImage& clean, const FormationParams& p);

/// Wavelength-independent special case (fog/haze): beta_D = beta_B = beta on
/// all channels, with the given airlight as B_inf.
Image3 apply_fog(const RGBDImage& clean, double beta, const Rgb<double>& airlight);

/// Exact algebraic inverse of apply_medium given the true parameters and
/// depth: J = (I - B_inf (1 - e^{-beta_B z})) e^{+beta_D z}. Not clamped.
Image3 invert_medium(const Image3& degraded, const Image1& depth, const FormationParams& p);

/// The single-opaque-object limit of the ray model:
///   C = e^{-sigma_med z} c_obj + (1 - e^{-sigma_med z}) c_med.
Rgb<double> closed_form_single_object(const Rgb<double>& c_obj, const Rgb<double>& c_med,
                                      const Rgb<double>& sigma_med, double z);

/// Discretizes a ray with uniform step `delta`, places an opaque object
/// (density sigma_obj_peak) at depth z = k*delta, renders with the
/// per-ray-constant simplified model and returns the max-abs difference
/// against closed_form_single_object over channels. z must be an integer
/// multiple of delta.
double reduction_residual(double delta, double sigma_obj_peak, const Rgb<double>& sigma_med,
                          const Rgb<double>& c_med, const Rgb<double>& c_obj, double z);

}  // namespace sfield
