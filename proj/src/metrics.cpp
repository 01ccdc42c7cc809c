// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sfield {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5, kK1 = 0.01, kK2 = 0.03;

void check_shape(int aw, int ah, int bw, int bh, const char* who) {
    if (aw != bw || ah != bh) throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

}  // namespace

double psnr(const Image3& a, const Image3& b, double peak) {
    check_shape(a.width, a.height, b.width, b.height, "psnr");
    if (a.data.empty()) throw std::invalid_argument("psnr: empty image");
    if (!(peak > 0)) throw std::invalid_argument("psnr: peak must be positive");
    double se = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        se += d * d;
    }
    const double mse = se / double(a.data.size());
    if (mse == 0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Image3& a, const Image3& b) {
    check_shape(a.width, a.height, b.width, b.height, "ssim");
    if (a.width < kWin || a.height < kWin)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");

    const int w = a.width, h = a.height;
    std::vector<double> ga(std::size_t(w) * h), gb(std::size_t(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto pa = a.rgb(x, y), pb = b.rgb(x, y);
            ga[std::size_t(y) * w + x] = (pa[0] + pa[1] + pa[2]) / 3.0;
            gb[std::size_t(y) * w + x] = (pb[0] + pb[1] + pb[2]) / 3.0;
        }

    double kernel[kWin];
    double ksum = 0;
    for (int i = 0; i < kWin; ++i) {
        const double d = i - (kWin - 1) / 2.0;
        kernel[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        ksum += kernel[i];
    }
    for (double& k : kernel) k /= ksum;

    const double c1 = kK1 * kK1, c2 = kK2 * kK2;
    const int r = kWin / 2;
    double total = 0;
    std::size_t count = 0;
    for (int y = r; y < h - r; ++y)
        for (int x = r; x < w - r; ++x) {
            double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const double wgt = kernel[dy + r] * kernel[dx + r];
                    const double pa = ga[std::size_t(y + dy) * w + (x + dx)];
                    const double pb = gb[std::size_t(y + dy) * w + (x + dx)];
                    ma += wgt * pa;
                    mb += wgt * pb;
                    va += wgt * pa * pa;
                    vb += wgt * pb * pb;
                    cov += wgt * pa * pb;
                }
            va -= ma * ma;
            vb -= mb * mb;
            cov -= ma * mb;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                     ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / double(count);
}

DepthMetrics depth_metrics(const Image1& pred, const Image1& gt, const Image1& mask) {
    check_shape(pred.width, pred.height, gt.width, gt.height, "depth_metrics");
    check_shape(pred.width, pred.height, mask.width, mask.height, "depth_metrics");
    double se = 0, rel = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        if (!(mask.data[i] > 0.5)) continue;
        if (!(gt.data[i] > 0))
            throw std::invalid_argument("depth_metrics: nonpositive ground truth inside mask");
        const double d = pred.data[i] - gt.data[i];
        se += d * d;
        rel += std::abs(d) / gt.data[i];
        ++n;
    }
    if (n == 0) throw std::invalid_argument("depth_metrics: empty mask");
    return {std::sqrt(se / double(n)), rel / double(n)};
}

void write_metrics_csv(const std::string& path, std::span<const MetricsRow> rows) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot open metrics csv for writing: " + path);
    f << "run_id,split,view,task,psnr,ssim,depth_rmse,depth_absrel\n";
    for (const auto& r : rows) {
        std::ostringstream line;
        line.precision(10);
        line << r.run_id << ',' << r.split << ',' << r.view << ',' << r.task << ',' << r.psnr
             << ',' << r.ssim << ',' << r.depth_rmse << ',' << r.depth_absrel;
        f << line.str() << "\n";
    }
    if (!f) throw io_error("short write on metrics csv: " + path);
}

}  // namespace sfield
