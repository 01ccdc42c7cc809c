// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sfield/common.hpp"

namespace sfield {

template <class T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 64-byte-aligned allocator for buffers that Eigen maps directly. Pinning
/// the base alignment keeps vectorized reduction order, and therefore the
/// exact float results, independent of where the heap happens to place a
/// buffer; training runs stay bitwise reproducible.
template <class T, std::size_t Align = 64>
struct AlignedAlloc {
    using value_type = T;
    AlignedAlloc() = default;
    template <class U>
    AlignedAlloc(const AlignedAlloc<U, Align>&) {}
    template <class U>
    struct rebind {
        using other = AlignedAlloc<U, Align>;
    };
    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(Align)));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t(Align)); }
    friend bool operator==(const AlignedAlloc&, const AlignedAlloc&) { return true; }
    friend bool operator!=(const AlignedAlloc&, const AlignedAlloc&) { return false; }
};

template <class T>
using AlignedVec = std::vector<T, AlignedAlloc<T>>;

/// Flat 32-bit parameter storage with named, shaped segments. Segments are
/// appended once at model build time and then stay fixed for the whole run.
class ParamVector {
  public:
    struct Segment {
        std::string name;
        std::vector<int> shape;
        std::size_t offset = 0;
        std::size_t count = 0;
    };

    std::size_t add(std::string name, std::vector<int> shape);

    float* data() { return storage_.data(); }
    const float* data() const { return storage_.data(); }
    std::size_t size() const { return storage_.size(); }

    const std::vector<Segment>& segments() const { return segments_; }
    const Segment& segment(const std::string& name) const;

    /// Name of the segment containing flat index i ("?" past the end).
    const std::string& segment_of(std::size_t i) const;

    /// Copy of the parameters widened to the requested scalar type.
    template <class T>
    std::vector<T> cast() const {
        return std::vector<T>(storage_.begin(), storage_.end());
    }

  private:
    AlignedVec<float> storage_;
    std::vector<Segment> segments_;
};

/// A dense layer's location inside a parameter blob: weight (out x in,
/// row-major) followed by bias (out).
struct LinearSpec {
    std::size_t w = 0, b = 0;
    int in = 0, out = 0;
};

/// Registers weight + bias segments for a layer.
LinearSpec add_linear(ParamVector& params, const std::string& name, int in, int out);

/// y = x w^T + b for a row-per-sample batch.
template <class T>
void linear_forward(const T* params, const LinearSpec& spec, const MatX<T>& x, MatX<T>& y) {
    Eigen::Map<const MatX<T>> w(params + spec.w, spec.out, spec.in);
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(params + spec.b, spec.out);
    y.noalias() = x * w.transpose();
    y.rowwise() += b.transpose();
}

/// Accumulates dW, db into `grad` and, when dx is non-null, writes the input
/// gradient into it.
template <class T>
void linear_backward(const T* params, const LinearSpec& spec, const MatX<T>& x, const MatX<T>& dy,
                     MatX<T>* dx, T* grad) {
    Eigen::Map<MatX<T>> dw(grad + spec.w, spec.out, spec.in);
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(grad + spec.b, spec.out);
    dw.noalias() += dy.transpose() * x;
    // Row-sequential bias reduction. Eigen's colwise().sum() picks its
    // summation order from the destination alignment, which makes bitwise
    // results depend on where the gradient buffer happens to live.
    if (dy.rows() > 0) {
        Eigen::Matrix<T, 1, Eigen::Dynamic> csum = dy.row(0);
        for (long i = 1; i < dy.rows(); ++i) csum += dy.row(i);
        db += csum.transpose();
    }
    if (dx) {
        Eigen::Map<const MatX<T>> w(params + spec.w, spec.out, spec.in);
        dx->noalias() = dy * w;
    }
}

/// In-place softplus; `pre` keeps the preactivation for the backward pass.
/// Written as packet-vectorizable array expressions (same stable form as the
/// scalar softplus: max(x,0) + log1p(e^{-|x|})); the scalar lambda version
/// cost more than the gemms at training batch sizes.
template <class T>
void softplus_forward(MatX<T>& x, MatX<T>& pre) {
    pre = x;
    x.array() = pre.array().max(T(0)) + (-pre.array().abs()).exp().log1p();
}

/// d(softplus)/dx = sigmoid(x), applied to dy in place. The one-branch form
/// underflows cleanly to 0 for very negative preactivations.
template <class T>
void softplus_backward(const MatX<T>& pre, MatX<T>& dy) {
    dy.array() *= T(1) / (T(1) + (-pre.array()).exp());
}

}  // namespace sfield
