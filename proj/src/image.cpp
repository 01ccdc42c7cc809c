// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/image.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sfield {

void quantize_f32(Image1& img) {
    for (double& v : img.data) v = double(float(v));
}
void quantize_f32(Image3& img) {
    for (double& v : img.data) v = double(float(v));
}

// ---------------------------------------------------------------------------
// PFM

namespace {

void write_pfm_impl(const std::string& path, const char* magic, int width, int height,
                    int channels, const std::vector<double>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << magic << "\n" << width << " " << height << "\n" << "-1.0" << "\n";
    std::vector<float> row(std::size_t(width) * channels);
    for (int y = height - 1; y >= 0; --y) {  // PFM stores bottom row first
        const double* src = &data[std::size_t(y) * width * channels];
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = float(src[i]);
        out.write(reinterpret_cast<const char*>(row.data()),
                  std::streamsize(row.size() * sizeof(float)));
    }
    if (!out) throw io_error("failed writing: " + path);
}

void read_pfm_impl(const std::string& path, const char* want_magic, int channels, int& width,
                   int& height, std::vector<double>& data) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string magic;
    double scale = 0;
    in >> magic >> width >> height >> scale;
    if (!in || magic != want_magic) throw io_error("not a " + std::string(want_magic) + " PFM: " + path);
    if (width <= 0 || height <= 0) throw io_error("bad PFM dimensions: " + path);
    if (scale >= 0) throw io_error("big-endian PFM not supported: " + path);
    in.get();  // single whitespace after the scale
    data.resize(std::size_t(3) * 0);
    data.assign(std::size_t(width) * height * channels, 0.0);
    std::vector<float> row(std::size_t(width) * channels);
    for (int y = height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
        if (!in) throw io_error("truncated PFM: " + path);
        double* dst = &data[std::size_t(y) * width * channels];
        for (std::size_t i = 0; i < row.size(); ++i) dst[i] = double(row[i]);
    }
}

}  // namespace

void write_pfm(const std::string& path, const Image3& img) {
    write_pfm_impl(path, "PF", img.width, img.height, 3, img.data);
}
void write_pfm(const std::string& path, const Image1& img) {
    write_pfm_impl(path, "Pf", img.width, img.height, 1, img.data);
}

Image3 read_pfm3(const std::string& path) {
    Image3 img;
    read_pfm_impl(path, "PF", 3, img.width, img.height, img.data);
    return img;
}
Image1 read_pfm1(const std::string& path) {
    Image1 img;
    read_pfm_impl(path, "Pf", 1, img.width, img.height, img.data);
    return img;
}

// ---------------------------------------------------------------------------
// PNG preview (8-bit, zlib-deflated, no interlace)

namespace {

void png_chunk(std::ofstream& out, const char type[4], const std::vector<unsigned char>& payload) {
    auto be32 = [](std::uint32_t v) {
        return std::array<unsigned char, 4>{static_cast<unsigned char>(v >> 24),
                                            static_cast<unsigned char>(v >> 16),
                                            static_cast<unsigned char>(v >> 8),
                                            static_cast<unsigned char>(v)};
    };
    const auto len = be32(std::uint32_t(payload.size()));
    out.write(reinterpret_cast<const char*>(len.data()), 4);
    out.write(type, 4);
    if (!payload.empty())
        out.write(reinterpret_cast<const char*>(payload.data()), std::streamsize(payload.size()));
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!payload.empty()) crc = crc32(crc, payload.data(), uInt(payload.size()));
    const auto crcb = be32(crc);
    out.write(reinterpret_cast<const char*>(crcb.data()), 4);
}

}  // namespace

void write_png_preview(const std::string& path, const Image3& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);

    // filter byte 0 per scanline, RGB8
    std::vector<unsigned char> raw;
    raw.reserve(std::size_t(img.height) * (1 + std::size_t(img.width) * 3));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                double v = std::clamp(img.at(x, y, c), 0.0, 1.0);
                v = std::pow(v, 1.0 / 2.2);
                raw.push_back(static_cast<unsigned char>(std::lround(v * 255.0)));
            }
        }
    }
    uLongf zlen = compressBound(uLong(raw.size()));
    std::vector<unsigned char> zdata(zlen);
    if (compress2(zdata.data(), &zlen, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw io_error("zlib compression failed for " + path);
    zdata.resize(zlen);

    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write(reinterpret_cast<const char*>(sig), 8);
    std::vector<unsigned char> ihdr(13);
    auto put32 = [&](std::size_t off, std::uint32_t v) {
        ihdr[off] = static_cast<unsigned char>(v >> 24);
        ihdr[off + 1] = static_cast<unsigned char>(v >> 16);
        ihdr[off + 2] = static_cast<unsigned char>(v >> 8);
        ihdr[off + 3] = static_cast<unsigned char>(v);
    };
    put32(0, std::uint32_t(img.width));
    put32(4, std::uint32_t(img.height));
    ihdr[8] = 8;   // bit depth
    ihdr[9] = 2;   // color type RGB
    ihdr[10] = ihdr[11] = ihdr[12] = 0;
    png_chunk(out, "IHDR", ihdr);
    png_chunk(out, "IDAT", zdata);
    png_chunk(out, "IEND", {});
    if (!out) throw io_error("failed writing: " + path);
}

std::string Fnv1a::hex() const {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << state;
    return os.str();
}

}  // namespace sfield
