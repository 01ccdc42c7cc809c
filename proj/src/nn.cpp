// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/nn.hpp"



namespace sfield {

std::size_t ParamVector::add(std::string name, std::vector<int> shape) {
    std::size_t count = 1;
    for (int d : shape) {
        if (d <= 0) throw config_error("ParamVector: nonpositive dimension");
        count *= std::size_t(d);
    }
    for (const Segment& s : segments_)
        if (s.name == name) throw config_error("ParamVector: duplicate segment " + name);
    Segment seg;
    seg.name = std::move(name);
    seg.shape = std::move(shape);
    seg.offset = storage_.size();
    seg.count = count;
    segments_.push_back(std::move(seg));
    storage_.resize(storage_.size() + count, 0.0f);
    return segments_.back().offset;
}

const ParamVector::Segment& ParamVector::segment(const std::string& name) const {
    for (const Segment& s : segments_)
        if (s.name == name) return s;
    throw config_error("ParamVector: no segment named " + name);
}

const std::string& ParamVector::segment_of(std::size_t i) const {
    static const std::string unknown = "?";
    for (const Segment& s : segments_)
        if (i >= s.offset && i < s.offset + s.count) return s.name;
    return unknown;
}

LinearSpec add_linear(ParamVector& params, const std::string& name, int in, int out) {
    LinearSpec spec;
    spec.in = in;
    spec.out = out;
    spec.w = params.add(name + ".w", {out, in});
    spec.b = params.add(name + ".b", {out});
    return spec;
}

}  // namespace sfield
