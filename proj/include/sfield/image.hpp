// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "sfield/common.hpp"

namespace sfield {

/// Single-channel plane, row-major, top row first. Values held in double;
/// files store 32-bit floats.
struct Image1 {
    int width = 0, height = 0;
    std::vector<double> data;

    Image1() = default;
    Image1(int w, int h, double fill = 0) : width(w), height(h), data(std::size_t(w) * h, fill) {}

    double& at(int x, int y) { return data[std::size_t(y) * width + x]; }
    double at(int x, int y) const { return data[std::size_t(y) * width + x]; }
    std::size_t pixel_count() const { return data.size(); }
};

/// Interleaved RGB plane, row-major, top row first.
struct Image3 {
    int width = 0, height = 0;
    std::vector<double> data;  // 3 * width * height

    Image3() = default;
    Image3(int w, int h, double fill = 0) : width(w), height(h), data(std::size_t(3) * w * h, fill) {}

    double& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }
    Rgb<double> rgb(int x, int y) const {
        const std::size_t i = (std::size_t(y) * width + x) * 3;
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set_rgb(int x, int y, const Rgb<double>& v) {
        const std::size_t i = (std::size_t(y) * width + x) * 3;
        data[i] = v[0];
        data[i + 1] = v[1];
        data[i + 2] = v[2];
    }
    std::size_t pixel_count() const { return std::size_t(width) * height; }
};

/// Quantizes through 32-bit float, matching what a PFM write/read round trip
/// produces. Used so datasets are exactly reproducible from their files.
void quantize_f32(Image1& img);
void quantize_f32(Image3& img);

// PFM: little-endian 32-bit float, scale header -1.0, scanlines bottom-up.
void write_pfm(const std::string& path, const Image3& img);
void write_pfm(const std::string& path, const Image1& img);
Image3 read_pfm3(const std::string& path);
Image1 read_pfm1(const std::string& path);

/// 8-bit preview: clamp to [0,1], gamma 1/2.2. For human inspection only.
void write_png_preview(const std::string& path, const Image3& img);

}  // namespace sfield
