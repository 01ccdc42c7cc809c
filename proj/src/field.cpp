// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/field.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sfield {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian f32");

void FieldConfig::validate() const {
    if (trunk_depth < 1 || trunk_width < 1 || color_width < 1)
        throw config_error("field: object net dimensions must be positive");
    if (medium_depth < 1 || medium_width < 1)
        throw config_error("field: medium net dimensions must be positive");
    if (skip_layer != -1 && (skip_layer < 1 || skip_layer >= trunk_depth))
        throw config_error("field: skip_layer must be -1 or in [1, trunk_depth)");
    if (l_pos < 0 || l_dir < 0) throw config_error("field: negative encoding octaves");
    EncodingConfig{l_pos, include_input}.validate();
    EncodingConfig{l_dir, include_input}.validate();
    if (!(density_init_sigma > 0.0) || !(medium_init_sigma > 0.0))
        throw config_error("field: init densities must be positive");
}

const char* medium_mode_name(MediumMode mode) {
    switch (mode) {
        case MediumMode::kOneParam: return "one";
        case MediumMode::kThreeParam: return "three";
        case MediumMode::kSixParam: return "six";
    }
    throw config_error("field: bad medium mode");
}

MediumMode medium_mode_from_name(const std::string& name) {
    if (name == "one") return MediumMode::kOneParam;
    if (name == "three") return MediumMode::kThreeParam;
    if (name == "six") return MediumMode::kSixParam;
    throw config_error("field: unknown medium mode '" + name + "'");
}

FieldModel FieldModel::build(const FieldConfig& cfg) {
    cfg.validate();
    FieldModel m;
    m.cfg = cfg;
    m.pos_enc = EncodingConfig{cfg.l_pos, cfg.include_input};
    m.dir_enc = EncodingConfig{cfg.l_dir, cfg.include_input};
    const int pd = m.pos_dim(), dd = m.dir_dim(), w = cfg.trunk_width;

    for (int i = 0; i < cfg.trunk_depth; ++i) {
        int in = i == 0 ? pd : (i == cfg.skip_layer ? w + pd : w);
        m.trunk.push_back(add_linear(m.params, "trunk." + std::to_string(i), in, w));
    }
    m.density_head = add_linear(m.params, "density", w, 1);
    m.color_hidden = add_linear(m.params, "color.hidden", w + dd, cfg.color_width);
    m.color_out = add_linear(m.params, "color.out", cfg.color_width, 3);

    const int mw = cfg.medium_width;
    for (int i = 0; i < cfg.medium_depth; ++i) {
        int in = i == 0 ? dd : mw;
        m.medium_hidden.push_back(add_linear(m.params, "medium." + std::to_string(i), in, mw));
    }
    m.medium_color = add_linear(m.params, "medium.color", mw, 3);
    switch (cfg.medium_mode) {
        case MediumMode::kSixParam:
            m.medium_bs = add_linear(m.params, "medium.sigma_bs", mw, 3);
            m.medium_attn = add_linear(m.params, "medium.sigma_attn", mw, 3);
            break;
        case MediumMode::kThreeParam:
            m.medium_bs = add_linear(m.params, "medium.sigma", mw, 3);
            m.medium_attn = m.medium_bs;
            break;
        case MediumMode::kOneParam:
            m.medium_bs = add_linear(m.params, "medium.sigma", mw, 1);
            m.medium_attn = m.medium_bs;
            break;
    }
    return m;
}

FieldModel FieldModel::init(const FieldConfig& cfg, std::uint64_t seed) {
    FieldModel m = build(cfg);
    RngStream rng(seed);
    float* p = m.params.data();
    // Fan-in uniform init, drawn in segment registration order. Bias segments
    // borrow the fan-in of their weight sibling.
    for (const auto& seg : m.params.segments()) {
        int fan_in;
        if (seg.name.size() > 2 && seg.name.ends_with(".w")) {
            fan_in = seg.shape[1];
        } else {
            const auto& w = m.params.segment(seg.name.substr(0, seg.name.size() - 2) + ".w");
            fan_in = w.shape[1];
        }
        const double bound = 1.0 / std::sqrt(double(fan_in));
        for (std::size_t i = 0; i < seg.count; ++i)
            p[seg.offset + i] = float(uniform(rng, -bound, bound));
    }

    auto set_bias = [&](const LinearSpec& spec, double target) {
        const float v = float(softplus_inverse(target));
        for (int i = 0; i < spec.out; ++i) p[spec.b + i] = v;
    };
    set_bias(m.density_head, cfg.density_init_sigma);
    set_bias(m.medium_bs, cfg.medium_init_sigma);
    if (cfg.medium_mode == MediumMode::kSixParam) set_bias(m.medium_attn, cfg.medium_init_sigma);
    return m;
}

// ---------------------------------------------------------------------------
// Checkpoints

static std::map<std::string, std::string> config_to_map(const FieldConfig& c) {
    std::ostringstream d1, d2;
    d1 << std::setprecision(17) << c.density_init_sigma;
    d2 << std::setprecision(17) << c.medium_init_sigma;
    return {
        {"l_pos", std::to_string(c.l_pos)},
        {"l_dir", std::to_string(c.l_dir)},
        {"include_input", c.include_input ? "1" : "0"},
        {"trunk_depth", std::to_string(c.trunk_depth)},
        {"trunk_width", std::to_string(c.trunk_width)},
        {"skip_layer", std::to_string(c.skip_layer)},
        {"color_width", std::to_string(c.color_width)},
        {"medium_depth", std::to_string(c.medium_depth)},
        {"medium_width", std::to_string(c.medium_width)},
        {"medium_mode", medium_mode_name(c.medium_mode)},
        {"density_init_sigma", d1.str()},
        {"medium_init_sigma", d2.str()},
    };
}

static FieldConfig config_from_map(std::map<std::string, std::string>& kv) {
    FieldConfig c;
    auto take = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw io_error(std::string("checkpoint: missing config key ") + key);
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    c.l_pos = std::stoi(take("l_pos"));
    c.l_dir = std::stoi(take("l_dir"));
    c.include_input = take("include_input") == "1";
    c.trunk_depth = std::stoi(take("trunk_depth"));
    c.trunk_width = std::stoi(take("trunk_width"));
    c.skip_layer = std::stoi(take("skip_layer"));
    c.color_width = std::stoi(take("color_width"));
    c.medium_depth = std::stoi(take("medium_depth"));
    c.medium_width = std::stoi(take("medium_width"));
    c.medium_mode = medium_mode_from_name(take("medium_mode"));
    c.density_init_sigma = std::stod(take("density_init_sigma"));
    c.medium_init_sigma = std::stod(take("medium_init_sigma"));
    return c;
}

void save_checkpoint(const std::string& path, const FieldModel& model,
                     const std::map<std::string, std::string>& extra) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open checkpoint for writing: " + path);
    f << "SFIELDCKPT 1\n";
    auto kv = config_to_map(model.cfg);
    for (const auto& [k, v] : extra) {
        if (kv.count(k)) throw io_error("checkpoint: extra key collides with config: " + k);
        kv.emplace(k, v);
    }
    f << "config " << kv.size() << "\n";
    for (const auto& [k, v] : kv) f << k << " " << v << "\n";
    const auto& segs = model.params.segments();
    f << "segments " << segs.size() << "\n";
    for (const auto& s : segs) {
        f << s.name << " " << s.shape.size();
        for (int d : s.shape) f << " " << d;
        f << " " << s.offset << "\n";
    }
    f << "blob " << model.params.size() << "\n";
    f.write(reinterpret_cast<const char*>(model.params.data()),
            std::streamsize(model.params.size() * sizeof(float)));
    if (!f) throw io_error("short write on checkpoint: " + path);
}

FieldModel load_checkpoint(const std::string& path, std::map<std::string, std::string>* extra) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "SFIELDCKPT 1")
        throw io_error("not a checkpoint (bad magic): " + path);

    auto expect_count = [&](const char* tag) {
        if (!std::getline(f, line)) throw io_error("checkpoint truncated: " + path);
        std::istringstream is(line);
        std::string word;
        std::size_t n = 0;
        if (!(is >> word >> n) || word != tag)
            throw io_error(std::string("checkpoint: expected '") + tag + "' line");
        return n;
    };

    std::map<std::string, std::string> kv;
    const std::size_t n_cfg = expect_count("config");
    for (std::size_t i = 0; i < n_cfg; ++i) {
        if (!std::getline(f, line)) throw io_error("checkpoint truncated: " + path);
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw io_error("checkpoint: malformed config line");
        kv.emplace(line.substr(0, sp), line.substr(sp + 1));
    }
    FieldModel model = FieldModel::build(config_from_map(kv));
    if (extra) *extra = kv;

    const std::size_t n_seg = expect_count("segments");
    const auto& segs = model.params.segments();
    if (n_seg != segs.size()) throw io_error("checkpoint: segment count mismatch");
    for (std::size_t i = 0; i < n_seg; ++i) {
        if (!std::getline(f, line)) throw io_error("checkpoint truncated: " + path);
        std::istringstream is(line);
        std::string name;
        std::size_t ndim;
        if (!(is >> name >> ndim)) throw io_error("checkpoint: malformed segment line");
        std::vector<int> shape(ndim);
        for (auto& d : shape)
            if (!(is >> d)) throw io_error("checkpoint: malformed segment line");
        std::size_t offset;
        if (!(is >> offset)) throw io_error("checkpoint: malformed segment line");
        const auto& s = segs[i];
        if (name != s.name || shape != s.shape || offset != s.offset)
            throw io_error("checkpoint: manifest does not match model layout at " + name);
    }

    const std::size_t count = expect_count("blob");
    if (count != model.params.size()) throw io_error("checkpoint: blob size mismatch");
    f.read(reinterpret_cast<char*>(model.params.data()), std::streamsize(count * sizeof(float)));
    if (std::size_t(f.gcount()) != count * sizeof(float))
        throw io_error("checkpoint truncated: " + path);
    return model;
}

}  // namespace sfield
