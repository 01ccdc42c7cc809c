// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "sfield/fd.hpp"
#include "sfield/losses.hpp"
#include "sfield/tape.hpp"

using namespace sfield;

namespace {

std::vector<Rgb<double>> random_colors(int n, RngStream& rng, double lo = 0.0, double hi = 1.0) {
    std::vector<Rgb<double>> v(static_cast<std::size_t>(n));
    for (auto& c : v) c = {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
    return v;
}

}  // namespace

TEST_CASE("reconstruction loss: zero iff exact, known value, not scale invariant") {
    std::vector<Rgb<double>> a = {{0.3, 0.5, 0.7}};
    CHECK(recon_loss<double>(a, a, 1e-3, nullptr) == 0.0);

    std::vector<Rgb<double>> chat = {{0.1, 0.1, 0.1}}, cstar = {{0.2, 0.2, 0.2}};
    const double expect = (0.1 / 0.101) * (0.1 / 0.101);
    CHECK(recon_loss<double>(chat, cstar, 1e-3, nullptr) == doctest::Approx(expect).epsilon(1e-14));

    std::vector<Rgb<double>> chat2 = {{0.2, 0.2, 0.2}}, cstar2 = {{0.4, 0.4, 0.4}};
    CHECK(recon_loss<double>(chat2, cstar2, 1e-3, nullptr) !=
          doctest::Approx(recon_loss<double>(chat, cstar, 1e-3, nullptr)));

    RngStream rng(3);
    auto x = random_colors(9, rng), y = random_colors(9, rng);
    CHECK(recon_loss<double>(x, y, 1e-3, nullptr) > 0.0);
    CHECK_THROWS_AS(recon_loss<double>({}, {}, 1e-3, nullptr), std::invalid_argument);
}

TEST_CASE("reconstruction gradient honors the stop-gradient denominator") {
    RngStream rng(11);
    auto chat = random_colors(4, rng, 0.05, 0.95);
    auto cstar = random_colors(4, rng, 0.05, 0.95);
    std::vector<Rgb<double>> grad;
    const double base = recon_loss<double>(chat, cstar, 1e-3, &grad);
    CHECK(base > 0);

    // independent route: the same expression on the tape, with sg() as the
    // tape's own stop-gradient
    Tape t;
    std::vector<std::array<TVar, 3>> v;
    TVar loss = var(t, 0.0);
    for (std::size_t i = 0; i < chat.size(); ++i) {
        v.push_back({var(t, chat[i][0]), var(t, chat[i][1]), var(t, chat[i][2])});
        for (int c = 0; c < 3; ++c) {
            TVar den = sg(v[i][std::size_t(c)]) + 1e-3;
            loss = loss + sqr((v[i][std::size_t(c)] - cstar[i][c]) / den) / (3.0 * double(chat.size()));
        }
    }
    CHECK(loss.v() == doctest::Approx(base).epsilon(1e-13));
    t.backward(loss.i);
    for (std::size_t i = 0; i < chat.size(); ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(grad[i][c] == doctest::Approx(v[i][std::size_t(c)].grad()).epsilon(1e-12));

    // a full finite difference (denominator re-evaluated) must NOT match:
    // the stop-gradient is load-bearing
    auto full = [&](const std::vector<double>& p) {
        auto ch = chat;
        ch[0][0] = p[0];
        return recon_loss<double>(ch, cstar, 1e-3, nullptr);
    };
    std::vector<double> p0 = {chat[0][0]};
    std::vector<double> analytic = {grad[0][0]};
    std::vector<std::size_t> idx = {0};
    const auto rec = fd_check(full, p0, analytic, idx, 1e-6);
    CHECK(rec[0].rel_err > 1e-3);
}

TEST_CASE("transmittance prior: modes at 0 and 1, peak at one half") {
    std::vector<double> x0 = {0.0}, x1 = {1.0}, xh = {0.5};
    const double l0 = acc_loss<double>(x0, nullptr);
    const double l1 = acc_loss<double>(x1, nullptr);
    const double lh = acc_loss<double>(xh, nullptr);
    CHECK(l0 == doctest::Approx(l1).epsilon(1e-14));
    CHECK(lh > l0);
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        std::vector<double> xs = {x};
        const double l = acc_loss<double>(xs, nullptr);
        CHECK(l <= lh + 1e-12);
        CHECK(l >= l0 - 1e-12);
        // symmetry under x <-> 1-x
        std::vector<double> xm = {1.0 - x};
        CHECK(l == doctest::Approx(acc_loss<double>(xm, nullptr)).epsilon(1e-12));
    }
    // strictly decreasing on [0.5, 1]
    double prev = lh;
    for (double x = 0.55; x <= 1.0; x += 0.05) {
        std::vector<double> xs = {x};
        const double l = acc_loss<double>(xs, nullptr);
        CHECK(l < prev);
        prev = l;
    }
}

TEST_CASE("transmittance prior gradient matches finite differences") {
    RngStream rng(17);
    std::vector<double> xs(12);
    for (auto& x : xs) x = uniform(rng, 0.02, 0.98);
    std::vector<double> grad;
    acc_loss<double>(xs, &grad);

    auto f = [](const std::vector<double>& p) { return acc_loss<double>(p, nullptr); };
    std::vector<std::size_t> idx(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) idx[i] = i;
    for (const auto& r : fd_check(f, xs, grad, idx, 1e-6)) CHECK(r.rel_err < 1e-7);

    // slope at 0.25: the nearer mode dominates with rate 1/scale
    std::vector<double> at = {0.25};
    std::vector<double> g;
    acc_loss<double>(at, &g);
    const double p0 = std::exp(-0.25 / kAccScale), p1 = std::exp(-0.75 / kAccScale);
    CHECK(g[0] == doctest::Approx((p0 - p1) / (kAccScale * (p0 + p1))).epsilon(1e-12));
    CHECK(g[0] > 0.9 / kAccScale);  // pull toward the 0 mode
}

TEST_CASE("total loss composes recon and the weighted prior") {
    RngStream rng(23);
    auto chat = random_colors(6, rng, 0.05, 0.95);
    auto cstar = random_colors(6, rng, 0.05, 0.95);
    std::vector<double> tvals(24);
    for (auto& x : tvals) x = uniform(rng, 0, 1);

    LossWeights lw;
    std::vector<Rgb<double>> d_chat;
    std::vector<double> d_t;
    const LossBreakdown bd = total_loss<double>(chat, cstar, tvals, lw, &d_chat, &d_t);
    CHECK(bd.total ==
          doctest::Approx(bd.recon + lw.lambda_acc * bd.acc).epsilon(1e-14));
    CHECK(bd.recon == doctest::Approx(recon_loss<double>(chat, cstar, 1e-3, nullptr)));
    CHECK(bd.acc == doctest::Approx(acc_loss<double>(tvals, nullptr)));

    // prior gradient comes back pre-scaled by lambda
    std::vector<double> raw;
    acc_loss<double>(tvals, &raw);
    for (std::size_t i = 0; i < tvals.size(); ++i)
        CHECK(d_t[i] == doctest::Approx(lw.lambda_acc * raw[i]).epsilon(1e-13));

    LossWeights off;
    off.lambda_acc = 0.0;
    const LossBreakdown b0 = total_loss<double>(chat, cstar, tvals, off, nullptr, nullptr);
    CHECK(b0.total == b0.recon);

    // perfect reconstruction with binary transmittance sits at the prior's
    // floor: within the normalization constant's weight of zero
    std::vector<double> binary = {0.0, 1.0, 1.0, 0.0};
    const LossBreakdown bperf = total_loss<double>(chat, chat, binary, lw, nullptr, nullptr);
    CHECK(std::abs(bperf.total) < 2e-4);
}

TEST_CASE("loss weights validate") {
    LossWeights lw;
    lw.lambda_acc = -1;
    CHECK_THROWS_AS(lw.validate(), config_error);
    lw = LossWeights{};
    lw.epsilon_recon = -1e-9;
    CHECK_THROWS_AS(lw.validate(), config_error);
}
