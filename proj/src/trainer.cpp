// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/trainer.hpp"

#include <cmath>
#include <iomanip>

namespace sfield {

void TrainConfig::validate() const {
    sampling.validate();
    loss.validate();
    optim.validate();
    if (batch_rays < 1) throw config_error("train: batch_rays must be positive");
    if (log_every < 0 || max_consecutive_skips < 0)
        throw config_error("train: negative log/skip setting");
}

TrainResult train_field(FieldModel& model, const Dataset& ds, const TrainConfig& tc,
                        std::ostream* log) {
    tc.validate();
    const std::vector<int> train_idx = ds.train_indices();
    if (train_idx.empty()) throw config_error("train: dataset has no training views");
    if (!(ds.t_near > 0 && ds.t_near < ds.t_far))
        throw config_error("train: dataset has no usable ray bounds");

    RngStream rng(tc.seed);
    Adam opt(model.params.size(), tc.optim);
    AlignedVec<float> grad(model.params.size());
    std::vector<Ray> rays(std::size_t(tc.batch_rays));
    std::vector<Rgb<double>> targets(std::size_t(tc.batch_rays));
    std::vector<std::uint8_t> medium_on(std::size_t(tc.batch_rays));
    SampledRays sr;

    TrainResult res;
    double tail_sum = 0;
    int tail_n = 0, consecutive_skips = 0;

    for (int iter = 0; iter < tc.optim.total_iters; ++iter) {
        for (int b = 0; b < tc.batch_rays; ++b) {
            const int vi = train_idx[detail::uniform_index(rng, train_idx.size())];
            const DatasetView& v = ds.views[std::size_t(vi)];
            const auto& in = v.camera.intrinsics;
            const int x = int(detail::uniform_index(rng, std::size_t(in.width)));
            const int y = int(detail::uniform_index(rng, std::size_t(in.height)));
            rays[std::size_t(b)] = generate_ray(in, v.camera.pose, x + 0.5, y + 0.5,
                                                ds.t_near, ds.t_far);
            targets[std::size_t(b)] = v.degraded.rgb(x, y);
            // depth sentinel 0 = capture passed through undegraded; fit that
            // ray with the object-only model so the medium head never sees a
            // pixel the simulated medium was not applied to
            medium_on[std::size_t(b)] = v.depth.at(x, y) > 0 ? 1 : 0;
        }

        hierarchical_sample(model, model.params.data(), rays, tc.sampling, rng, sr);
        sr.medium_on = medium_on;
        std::fill(grad.begin(), grad.end(), 0.0f);
        const LossBreakdown lb =
            sampled_loss_grad<float>(model, model.params.data(), sr, targets, tc.loss, grad.data());

        const double lr = tc.optim.lr_at(iter);
        const int skipped_before = opt.skipped();
        const double gnorm = opt.step(model.params.data(), grad.data(), lr);
        const bool bad = opt.skipped() > skipped_before || !std::isfinite(lb.total);
        consecutive_skips = bad ? consecutive_skips + 1 : 0;

        res.iters = iter + 1;
        res.last_loss = lb;
        if (tc.optim.total_iters - iter <= 100) {
            tail_sum += lb.total;
            ++tail_n;
        }
        if (log && tc.log_every > 0 && ((iter + 1) % tc.log_every == 0 || iter == 0)) {
            *log << "iter " << std::setw(6) << iter + 1 << "  lr " << std::scientific
                 << std::setprecision(2) << lr << std::defaultfloat << std::setprecision(5)
                 << "  loss " << lb.total << "  recon " << lb.recon << "  acc " << lb.acc
                 << "  |g| " << std::setprecision(3) << gnorm << "  skips " << opt.skipped()
                 << "\n";
            log->flush();
        }
        if (consecutive_skips > tc.max_consecutive_skips) {
            res.diverged = true;
            if (log) *log << "aborting: " << consecutive_skips << " consecutive non-finite steps\n";
            break;
        }
    }
    res.skipped = opt.skipped();
    res.tail_mean_total = tail_n > 0 ? tail_sum / tail_n : res.last_loss.total;
    return res;
}

}  // namespace sfield
