// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>

#include "sfield/common.hpp"

namespace sfield {

/// Sinusoidal frequency encoding. Per input dimension the output block is
/// [x (optional), sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^{L-1} pi x),
/// cos(2^{L-1} pi x)], blocks concatenated in input order.
struct EncodingConfig {
    int octaves = 0;
    bool include_input = true;

    int encoded_dim(int input_dim) const { return input_dim * (2 * octaves + (include_input ? 1 : 0)); }

    void validate() const {
        if (octaves < 0) throw config_error("encoding: octaves must be >= 0");
        if (octaves == 0 && !include_input)
            throw config_error("encoding: zero octaves without the input passthrough is empty");
    }
};

/// Writes encoded_dim(n) values at `out`.
template <class T>
void encode(const double* x, int n, const EncodingConfig& cfg, T* out) {
    std::size_t k = 0;
    for (int d = 0; d < n; ++d) {
        if (cfg.include_input) out[k++] = T(x[d]);
        double arg = M_PI * x[d];
        for (int j = 0; j < cfg.octaves; ++j) {
            out[k++] = T(std::sin(arg));
            out[k++] = T(std::cos(arg));
            arg *= 2.0;
        }
    }
}

}  // namespace sfield
