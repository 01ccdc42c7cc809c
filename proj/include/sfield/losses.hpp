// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sfield/common.hpp"

namespace sfield {

/// Scale of the two-sided Laplacian transmittance prior.
inline constexpr double kAccScale = 0.1;
/// log of the prior's normalizing constant over [0,1]; shifting by it keeps
/// reported loss values comparable across runs (gradient-equivalent).
inline const double kAccLogZ = std::log(2.0 * kAccScale * -std::expm1(-1.0 / kAccScale));

struct LossWeights {
    double lambda_acc = 1e-4;
    double epsilon_recon = 1e-3;

    void validate() const {
        if (!(lambda_acc >= 0) || !(epsilon_recon >= 0))
            throw config_error("loss weights must be nonnegative");
    }
};

struct LossBreakdown {
    double total = 0, recon = 0, acc = 0;
};

/// Relative-error reconstruction loss: mean over rays and channels of
/// ((chat - cstar) / (sg(chat) + eps))^2. The denominator is under
/// stop-gradient, so d/dchat treats it as a constant. Gradients are written
/// (not accumulated) when `d_c_hat` is non-null.
///
/// `detached_c`, when non-empty, supplies the detached prediction used in
/// the denominator instead of c_hat itself. Finite-difference checks need
/// this: perturbing parameters must not move the stop-gradient value, so the
/// FD objective pins it to the base-point prediction. At the base point the
/// loss and gradient are identical either way.
template <class T>
double recon_loss(std::span<const Rgb<T>> c_hat, std::span<const Rgb<T>> c_star, double eps,
                  std::vector<Rgb<T>>* d_c_hat, std::span<const Rgb<T>> detached_c = {}) {
    if (c_hat.size() != c_star.size())
        throw std::invalid_argument("recon_loss: batch size mismatch");
    if (!detached_c.empty() && detached_c.size() != c_hat.size())
        throw std::invalid_argument("recon_loss: detached prediction size mismatch");
    if (c_hat.empty()) throw std::invalid_argument("recon_loss: empty batch");
    if (d_c_hat) d_c_hat->assign(c_hat.size(), Rgb<T>{0, 0, 0});
    const double norm = 1.0 / (3.0 * double(c_hat.size()));
    double loss = 0;
    for (std::size_t i = 0; i < c_hat.size(); ++i)
        for (int c = 0; c < 3; ++c) {
            const double sg = detached_c.empty() ? double(c_hat[i][c]) : double(detached_c[i][c]);
            const double den = sg + eps;
            const double r = (double(c_hat[i][c]) - double(c_star[i][c])) / den;
            loss += r * r * norm;
            if (d_c_hat) (*d_c_hat)[i][c] = T(2.0 * r / den * norm);
        }
    return loss;
}

/// Prior pushing per-sample object transmittance toward 0 or 1:
/// mean of -log(e^{-x/s} + e^{-(1-x)/s}) + log Z over all samples.
template <class T>
double acc_loss(std::span<const T> t_obj, std::vector<T>* d_t) {
    if (t_obj.empty()) throw std::invalid_argument("acc_loss: empty batch");
    if (d_t) d_t->assign(t_obj.size(), T(0));
    const double norm = 1.0 / double(t_obj.size());
    double loss = 0;
    for (std::size_t i = 0; i < t_obj.size(); ++i) {
        const double x = double(t_obj[i]);
        const double p0 = std::exp(-std::abs(x) / kAccScale);
        const double p1 = std::exp(-std::abs(1.0 - x) / kAccScale);
        loss += (-std::log(p0 + p1) + kAccLogZ) * norm;
        if (d_t) (*d_t)[i] = T((p0 - p1) / (kAccScale * (p0 + p1)) * norm);
    }
    return loss;
}

/// total = recon + lambda * acc. `d_t_obj` comes back already scaled by
/// lambda, ready to feed the renderer's backward pass.
template <class T>
LossBreakdown total_loss(std::span<const Rgb<T>> c_hat, std::span<const Rgb<T>> c_star,
                         std::span<const T> t_obj, const LossWeights& lw,
                         std::vector<Rgb<T>>* d_c_hat, std::vector<T>* d_t_obj,
                         std::span<const Rgb<T>> detached_c = {}) {
    lw.validate();
    LossBreakdown out;
    out.recon = recon_loss(c_hat, c_star, lw.epsilon_recon, d_c_hat, detached_c);
    out.acc = acc_loss(t_obj, d_t_obj);
    out.total = out.recon + lw.lambda_acc * out.acc;
    if (d_t_obj)
        for (auto& g : *d_t_obj) g = T(double(g) * lw.lambda_acc);
    return out;
}

}  // namespace sfield
