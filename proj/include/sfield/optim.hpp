// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "sfield/common.hpp"

namespace sfield {

struct OptimConfig {
    double lr_peak = 5e-4;
    double lr_final = 5e-5;  // log-linear decay endpoint
    int warmup_iters = 500;
    int total_iters = 20000;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double clip_norm = 10.0;

    void validate() const;

    /// Linear warmup to lr_peak, then log-linear decay to lr_final.
    double lr_at(int iter) const;
};

/// Bias-corrected Adam with global-norm clipping. Parameters live in f32;
/// moments and all arithmetic are f64. A non-finite gradient skips the
/// update (state untouched) and increments the skip counter.
class Adam {
  public:
    Adam(std::size_t n, const OptimConfig& cfg);

    /// One update in place. Returns the pre-clip global gradient norm.
    double step(float* params, const float* grads, double lr);

    int steps_taken() const { return t_; }
    int skipped() const { return skipped_; }

  private:
    OptimConfig cfg_;
    std::vector<double> m_, v_;
    int t_ = 0, skipped_ = 0;
};

}  // namespace sfield
