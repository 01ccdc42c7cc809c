// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/optim.hpp"

#include <algorithm>
#include <cmath>

namespace sfield {

void OptimConfig::validate() const {
    if (!(lr_peak > 0) || !(lr_final > 0)) throw config_error("optim: learning rates must be > 0");
    // total_iters == 0 is a valid no-op run (checkpoint equals initialization)
    if (warmup_iters < 0 || total_iters < 0 || (total_iters > 0 && warmup_iters >= total_iters))
        throw config_error("optim: need 0 <= warmup_iters < total_iters");
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
        throw config_error("optim: betas must lie in [0,1)");
    if (!(eps > 0) || !(clip_norm > 0)) throw config_error("optim: eps/clip_norm must be > 0");
}

double OptimConfig::lr_at(int iter) const {
    if (iter < warmup_iters) return lr_peak * double(iter + 1) / double(warmup_iters);
    const double u =
        std::clamp(double(iter - warmup_iters) / double(total_iters - warmup_iters), 0.0, 1.0);
    return std::exp(std::log(lr_peak) + u * (std::log(lr_final) - std::log(lr_peak)));
}

Adam::Adam(std::size_t n, const OptimConfig& cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {
    cfg.validate();
}

double Adam::step(float* params, const float* grads, double lr) {
    const std::size_t n = m_.size();
    double sq = 0;
    for (std::size_t i = 0; i < n; ++i) sq += double(grads[i]) * double(grads[i]);
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm)) {
        ++skipped_;
        return norm;
    }
    const double scale = norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = double(grads[i]) * scale;
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
        const double update = lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.eps);
        params[i] = float(double(params[i]) - update);
    }
    return norm;
}

}  // namespace sfield
