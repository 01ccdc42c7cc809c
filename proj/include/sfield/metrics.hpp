// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "sfield/image.hpp"

namespace sfield {

/// 10 log10(peak^2 / MSE) over all channels, capped at 99 dB (the sentinel
/// for identical images).
double psnr(const Image3& a, const Image3& b, double peak = 1.0);

/// Mean local SSIM on the channel-mean grayscale image: 11x11 Gaussian
/// window (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1. Only centers
/// whose window lies fully inside the image contribute. Throws if either
/// image dimension is below the window size.
double ssim(const Image3& a, const Image3& b);

struct DepthMetrics {
    double rmse = 0, abs_rel = 0;
};

/// RMSE and mean |pred-gt|/gt over pixels where mask > 0.5. Throws when the
/// mask selects nothing or a selected gt pixel is nonpositive.
DepthMetrics depth_metrics(const Image1& pred, const Image1& gt, const Image1& mask);

struct MetricsRow {
    std::string run_id, split;
    int view = 0;
    std::string task;
    double psnr = 0, ssim = 0, depth_rmse = 0, depth_absrel = 0;
};

/// CSV with a fixed header: run_id, split, view, task, psnr, ssim,
/// depth_rmse, depth_absrel.
void write_metrics_csv(const std::string& path, std::span<const MetricsRow> rows);

}  // namespace sfield
