// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sfield {

struct FdRecord {
    std::size_t index = 0;
    double numeric = 0, analytic = 0, rel_err = 0;
};

inline double fd_rel_err(double numeric, double analytic) {
    return std::abs(numeric - analytic) / std::max(std::abs(analytic), 1e-6);
}

/// Central-difference check of a scalar function's gradient at `params`,
/// restricted to the chosen coordinates. `f` must be a pure function of the
/// parameter vector.
inline std::vector<FdRecord> fd_check(const std::function<double(const std::vector<double>&)>& f,
                                      std::vector<double> params, std::span<const double> analytic,
                                      std::span<const std::size_t> indices, double h) {
    std::vector<FdRecord> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) {
        const double saved = params[idx];
        params[idx] = saved + h;
        const double fp = f(params);
        params[idx] = saved - h;
        const double fm = f(params);
        params[idx] = saved;
        const double g = (fp - fm) / (2.0 * h);
        out.push_back({idx, g, analytic[idx], fd_rel_err(g, analytic[idx])});
    }
    return out;
}

}  // namespace sfield
