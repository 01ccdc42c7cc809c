// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sfield/encoding.hpp"
#include "sfield/nn.hpp"
#include "sfield/render.hpp"

namespace sfield {

/// Shapes and initialization targets for the two networks. The object net is
/// a position-encoded trunk with a scalar density head and a direction-aware
/// color head; the medium net maps the encoded view direction to the per-ray
/// medium coefficients.
struct FieldConfig {
    int l_pos = 6;
    int l_dir = 2;
    bool include_input = true;

    int trunk_depth = 4;
    int trunk_width = 64;
    int skip_layer = 2;  // trunk layer whose input gets the encoding re-appended
    int color_width = 64;

    int medium_depth = 2;
    int medium_width = 64;
    MediumMode medium_mode = MediumMode::kSixParam;

    // softplus outputs right after initialization
    double density_init_sigma = 1.2;
    double medium_init_sigma = 0.3;

    void validate() const;
};

const char* medium_mode_name(MediumMode mode);
MediumMode medium_mode_from_name(const std::string& name);

/// Parameter layout plus the configuration that produced it. Forward and
/// backward passes read parameters through a raw pointer so the same code
/// serves the float training path and the double verification path.
struct FieldModel {
    FieldConfig cfg;
    EncodingConfig pos_enc, dir_enc;
    ParamVector params;

    std::vector<LinearSpec> trunk;
    LinearSpec density_head;
    LinearSpec color_hidden, color_out;
    std::vector<LinearSpec> medium_hidden;
    LinearSpec medium_color;
    LinearSpec medium_bs, medium_attn;  // same segment under tied modes

    int pos_dim() const { return pos_enc.encoded_dim(3); }
    int dir_dim() const { return dir_enc.encoded_dim(3); }

    /// Layout with zeroed parameters.
    static FieldModel build(const FieldConfig& cfg);
    /// Layout plus fan-in uniform init and the configured head biases.
    static FieldModel init(const FieldConfig& cfg, std::uint64_t seed);
};

// ---------------------------------------------------------------------------
// Checkpoints: text header (magic, version, config, segment manifest)
// followed by the raw little-endian f32 parameter blob. Byte-stable for a
// given model, so equal runs produce equal files.

void save_checkpoint(const std::string& path, const FieldModel& model,
                     const std::map<std::string, std::string>& extra);
FieldModel load_checkpoint(const std::string& path, std::map<std::string, std::string>* extra);

// ---------------------------------------------------------------------------
// Batched evaluation. Traces hold every intermediate needed by the backward
// pass; callers reuse them across batches so steady-state training does not
// allocate.

template <class T>
struct ObjectTrace {
    MatX<T> enc_pos, enc_dir;
    std::vector<MatX<T>> trunk_in, trunk_pre;
    MatX<T> feat;
    MatX<T> density_raw;
    MatX<T> color_in, color_pre, color_post, color_raw;
    std::vector<T> sigma;
    std::vector<Rgb<T>> color;
};

template <class T>
struct MediumTrace {
    MatX<T> enc_dir;
    std::vector<MatX<T>> in, pre;
    MatX<T> feat;
    MatX<T> color_raw, bs_raw, attn_raw;
    std::vector<MediumCoeffs<T>> coeffs;
};

namespace detail {

template <class T>
void encode_batch(const std::vector<Vec3>& v, const EncodingConfig& cfg, MatX<T>& out) {
    out.resize(long(v.size()), cfg.encoded_dim(3));
    for (std::size_t i = 0; i < v.size(); ++i) encode(&v[i].x, 3, cfg, out.data() + out.cols() * long(i));
}

/// Runs a softplus MLP; `ins`/`pres` record per-layer inputs and
/// preactivations, `out` ends as the final post-activation.
template <class T>
void mlp_forward(const T* params, const std::vector<LinearSpec>& layers, int skip_layer,
                 const MatX<T>& enc, std::vector<MatX<T>>& ins, std::vector<MatX<T>>& pres,
                 MatX<T>& out) {
    const std::size_t depth = layers.size();
    ins.resize(depth);
    pres.resize(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        if (i == 0) {
            ins[0] = enc;
        } else if (int(i) == skip_layer) {
            ins[i].resize(out.rows(), out.cols() + enc.cols());
            ins[i] << out, enc;
        } else {
            ins[i] = out;
        }
        linear_forward(params, layers[i], ins[i], out);
        softplus_forward(out, pres[i]);
    }
}

}  // namespace detail

/// Density + color for a batch of (position, direction) samples.
template <class T>
void object_forward(const FieldModel& m, const T* params, const std::vector<Vec3>& pos,
                    const std::vector<Vec3>& dir, ObjectTrace<T>& tr) {
    if (pos.size() != dir.size()) throw std::invalid_argument("object_forward: batch mismatch");
    const long n = long(pos.size());
    detail::encode_batch(pos, m.pos_enc, tr.enc_pos);
    detail::encode_batch(dir, m.dir_enc, tr.enc_dir);

    detail::mlp_forward(params, m.trunk, m.cfg.skip_layer, tr.enc_pos, tr.trunk_in, tr.trunk_pre,
                        tr.feat);

    linear_forward(params, m.density_head, tr.feat, tr.density_raw);

    tr.color_in.resize(n, tr.feat.cols() + tr.enc_dir.cols());
    tr.color_in << tr.feat, tr.enc_dir;
    linear_forward(params, m.color_hidden, tr.color_in, tr.color_post);
    softplus_forward(tr.color_post, tr.color_pre);
    linear_forward(params, m.color_out, tr.color_post, tr.color_raw);

    tr.sigma.resize(std::size_t(n));
    Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>> sig(tr.sigma.data(), n);
    sig = tr.density_raw.col(0).array().max(T(0)) +
          (-tr.density_raw.col(0).array().abs()).exp().log1p();

    tr.color.resize(std::size_t(n));
    MatX<T> cs = (T(1) / (T(1) + (-tr.color_raw.array()).exp())).matrix();
    for (long i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) tr.color[i][c] = cs(i, c);
}

/// Density only (no color head, no trace); the coarse-pass workhorse.
template <class T>
void object_density(const FieldModel& m, const T* params, const std::vector<Vec3>& pos,
                    std::vector<T>& sigma) {
    MatX<T> enc;
    detail::encode_batch(pos, m.pos_enc, enc);
    std::vector<MatX<T>> ins, pres;
    MatX<T> feat, raw;
    detail::mlp_forward(params, m.trunk, m.cfg.skip_layer, enc, ins, pres, feat);
    linear_forward(params, m.density_head, feat, raw);
    sigma.resize(std::size_t(raw.rows()));
    Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>> sig(sigma.data(), raw.rows());
    sig = raw.col(0).array().max(T(0)) + (-raw.col(0).array().abs()).exp().log1p();
}

/// Reverse pass matching object_forward; accumulates parameter gradients.
template <class T>
void object_backward(const FieldModel& m, const T* params, const ObjectTrace<T>& tr,
                     const std::vector<T>& dsigma, const std::vector<Rgb<T>>& dcolor, T* grad) {
    const long n = long(tr.sigma.size());

    MatX<T> draw(n, 1);
    draw.col(0).array() = T(1) / (T(1) + (-tr.density_raw.col(0).array()).exp());
    for (long i = 0; i < n; ++i) draw(i, 0) *= dsigma[std::size_t(i)];
    MatX<T> dfeat;
    linear_backward(params, m.density_head, tr.feat, draw, &dfeat, grad);

    MatX<T> dcraw = (T(1) / (T(1) + (-tr.color_raw.array()).exp())).matrix();
    for (long i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            const T s = dcraw(i, c);
            dcraw(i, c) = dcolor[std::size_t(i)][c] * s * (T(1) - s);
        }
    MatX<T> dchidden;
    linear_backward(params, m.color_out, tr.color_post, dcraw, &dchidden, grad);
    softplus_backward(tr.color_pre, dchidden);
    MatX<T> dcolor_in;
    linear_backward(params, m.color_hidden, tr.color_in, dchidden, &dcolor_in, grad);
    dfeat += dcolor_in.leftCols(tr.feat.cols());

    // trunk, walking the skip concatenation backwards
    MatX<T> dcur = dfeat, dprev;
    for (int i = int(m.trunk.size()) - 1; i >= 0; --i) {
        softplus_backward(tr.trunk_pre[std::size_t(i)], dcur);
        linear_backward(params, m.trunk[std::size_t(i)], tr.trunk_in[std::size_t(i)], dcur,
                        i > 0 ? &dprev : nullptr, grad);
        if (i > 0) {
            if (i == m.cfg.skip_layer)
                dcur = dprev.leftCols(dprev.cols() - tr.enc_pos.cols());
            else
                dcur = dprev;
        }
    }
}

/// Medium coefficients for a batch of ray directions. Head wiring per mode:
/// six-parameter uses separate backscatter/attenuation heads, three shares
/// one 3-channel head, one shares a single scalar head.
template <class T>
void medium_forward(const FieldModel& m, const T* params, const std::vector<Vec3>& dir,
                    MediumTrace<T>& tr) {
    const long n = long(dir.size());
    detail::encode_batch(dir, m.dir_enc, tr.enc_dir);
    detail::mlp_forward(params, m.medium_hidden, -1, tr.enc_dir, tr.in, tr.pre, tr.feat);

    linear_forward(params, m.medium_color, tr.feat, tr.color_raw);
    linear_forward(params, m.medium_bs, tr.feat, tr.bs_raw);
    const bool tied = m.cfg.medium_mode != MediumMode::kSixParam;
    if (!tied) linear_forward(params, m.medium_attn, tr.feat, tr.attn_raw);

    tr.coeffs.resize(std::size_t(n));
    for (long i = 0; i < n; ++i) {
        MediumCoeffs<T>& out = tr.coeffs[std::size_t(i)];
        out.mode = m.cfg.medium_mode;
        for (int c = 0; c < 3; ++c) {
            out.color[c] = sigmoid(tr.color_raw(i, c));
            const int bc = m.cfg.medium_mode == MediumMode::kOneParam ? 0 : c;
            out.sigma_bs[c] = softplus(tr.bs_raw(i, bc));
            out.sigma_attn[c] = tied ? out.sigma_bs[c] : softplus(tr.attn_raw(i, c));
        }
    }
}

template <class T>
void medium_backward(const FieldModel& m, const T* params, const MediumTrace<T>& tr,
                     const std::vector<Rgb<T>>& dcolor, const std::vector<Rgb<T>>& dbs,
                     const std::vector<Rgb<T>>& dattn, T* grad) {
    const long n = long(tr.coeffs.size());
    const bool tied = m.cfg.medium_mode != MediumMode::kSixParam;

    MatX<T> dcraw(n, 3);
    for (long i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            const T s = sigmoid(tr.color_raw(i, c));
            dcraw(i, c) = dcolor[std::size_t(i)][c] * s * (T(1) - s);
        }
    MatX<T> dfeat;
    linear_backward(params, m.medium_color, tr.feat, dcraw, &dfeat, grad);

    MatX<T> dbraw(n, tr.bs_raw.cols());
    dbraw.setZero();
    for (long i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            const int bc = m.cfg.medium_mode == MediumMode::kOneParam ? 0 : c;
            T g = dbs[std::size_t(i)][c];
            if (tied) g += dattn[std::size_t(i)][c];  // shared head sees both paths
            dbraw(i, bc) += g * sigmoid(tr.bs_raw(i, bc));
        }
    MatX<T> dtmp;
    linear_backward(params, m.medium_bs, tr.feat, dbraw, &dtmp, grad);
    dfeat += dtmp;

    if (!tied) {
        MatX<T> daraw(n, 3);
        for (long i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c)
                daraw(i, c) = dattn[std::size_t(i)][c] * sigmoid(tr.attn_raw(i, c));
        linear_backward(params, m.medium_attn, tr.feat, daraw, &dtmp, grad);
        dfeat += dtmp;
    }

    MatX<T> dcur = dfeat, dprev;
    for (int i = int(m.medium_hidden.size()) - 1; i >= 0; --i) {
        softplus_backward(tr.pre[std::size_t(i)], dcur);
        linear_backward(params, m.medium_hidden[std::size_t(i)], tr.in[std::size_t(i)], dcur,
                        i > 0 ? &dprev : nullptr, grad);
        if (i > 0) dcur = dprev;
    }
}

// Single-sample conveniences (bindings, probes, tests).
template <class T>
std::pair<T, Rgb<T>> object_forward_one(const FieldModel& m, const T* params, const Vec3& x,
                                        const Vec3& d) {
    ObjectTrace<T> tr;
    object_forward(m, params, std::vector<Vec3>{x}, std::vector<Vec3>{d}, tr);
    return {tr.sigma[0], tr.color[0]};
}

template <class T>
MediumCoeffs<T> medium_forward_one(const FieldModel& m, const T* params, const Vec3& d) {
    MediumTrace<T> tr;
    medium_forward(m, params, std::vector<Vec3>{d}, tr);
    return tr.coeffs[0];
}

}  // namespace sfield
