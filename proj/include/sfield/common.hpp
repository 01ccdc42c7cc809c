// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sfield {

/// Configuration / CLI usage problems. The CLI maps these to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File-system and format problems. The CLI maps these to exit code 3.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small vector / color types

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

/// One value per color channel (linear RGB unless stated otherwise).
template <class T>
using Rgb = std::array<T, 3>;

template <class T>
inline Rgb<T> rgb_const(T v) { return {v, v, v}; }

// ---------------------------------------------------------------------------
// Random streams
//
// All randomized operations take an explicit stream; draws go through the
// helpers below so sequences are identical across platforms (the standard
// distributions are implementation-defined).

using RngStream = std::mt19937_64;

inline double uniform01(RngStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
}

inline double uniform(RngStream& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline double gaussian(RngStream& rng) {
    // Box-Muller; draws two uniforms per call so the stream advance is fixed.
    double u1 = uniform01(rng), u2 = uniform01(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// ---------------------------------------------------------------------------
// Numerics

/// exp(e) with the exponent clamped below -80 so transmittance underflow
/// never produces denormals.
template <class T>
inline T clamped_exp(T e) {
    return std::exp(std::max(e, T(-80)));
}

template <class T>
inline T softplus(T x) {
    // log(1 + e^x), stable on both tails
    return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <class T>
inline T sigmoid(T x) {
    return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : T(1) - T(1) / (T(1) + std::exp(x));
}

/// Inverse of softplus: returns x with softplus(x) = y, y > 0.
inline double softplus_inverse(double y) {
    // log(e^y - 1); rewrite for small y to avoid cancellation
    return y > 20.0 ? y : std::log(std::expm1(y));
}

// ---------------------------------------------------------------------------
// Hashing (FNV-1a, used for dataset fingerprints)

struct Fnv1a {
    std::uint64_t state = 0xcbf29ce484222325ull;

    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state ^= p[i];
            state *= 0x100000001b3ull;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }

    std::string hex() const;
};

}  // namespace sfield
