// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sfield {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

KeyValueConfig KeyValueConfig::from_text(const std::string& text) {
    KeyValueConfig kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key");
        kv.set(key, value);
    }
    return kv;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : raw_)
        if (k == key) {
            v = value;
            return;
        }
    raw_.emplace_back(key, value);
}

bool KeyValueConfig::has(const std::string& key) const {
    return std::any_of(raw_.begin(), raw_.end(), [&](const auto& p) { return p.first == key; });
}

std::string KeyValueConfig::take(const std::string& key, const std::string& def, bool* present) {
    if (std::find(read_.begin(), read_.end(), key) == read_.end()) read_.push_back(key);
    for (const auto& [k, v] : raw_)
        if (k == key) {
            if (present) *present = true;
            return v;
        }
    if (present) *present = false;
    return def;
}

void KeyValueConfig::record(const std::string& key, const std::string& resolved) {
    for (auto& [k, v] : resolved_)
        if (k == key) {
            v = resolved;
            return;
        }
    resolved_.emplace_back(key, resolved);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& def) {
    const std::string v = take(key, def);
    record(key, v);
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double def) {
    bool present = false;
    const std::string v = take(key, "", &present);
    double out = def;
    if (present) {
        std::istringstream is(v);
        if (!(is >> out) || !(is >> std::ws).eof())
            throw config_error("config: key '" + key + "' is not a number: " + v);
    }
    record(key, format_double(out));
    return out;
}

int KeyValueConfig::get_int(const std::string& key, int def) {
    bool present = false;
    const std::string v = take(key, "", &present);
    int out = def;
    if (present) {
        std::istringstream is(v);
        if (!(is >> out) || !(is >> std::ws).eof())
            throw config_error("config: key '" + key + "' is not an integer: " + v);
    }
    record(key, std::to_string(out));
    return out;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t def) {
    bool present = false;
    const std::string v = take(key, "", &present);
    std::uint64_t out = def;
    if (present) {
        std::istringstream is(v);
        if (!(is >> out) || !(is >> std::ws).eof())
            throw config_error("config: key '" + key + "' is not a nonnegative integer: " + v);
    }
    record(key, std::to_string(out));
    return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool def) {
    bool present = false;
    const std::string v = take(key, "", &present);
    bool out = def;
    if (present) {
        if (v == "true" || v == "1") out = true;
        else if (v == "false" || v == "0") out = false;
        else throw config_error("config: key '" + key + "' is not a boolean: " + v);
    }
    record(key, out ? "true" : "false");
    return out;
}

Vec3 KeyValueConfig::get_vec3(const std::string& key, const Vec3& def) {
    bool present = false;
    const std::string v = take(key, "", &present);
    Vec3 out = def;
    if (present) {
        std::istringstream is(v);
        if (!(is >> out.x >> out.y >> out.z) || !(is >> std::ws).eof())
            throw config_error("config: key '" + key + "' is not a numeric triple: " + v);
    }
    record(key, format_double(out.x) + " " + format_double(out.y) + " " + format_double(out.z));
    return out;
}

std::vector<std::string> KeyValueConfig::unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : raw_)
        if (std::find(read_.begin(), read_.end(), k) == read_.end()) out.push_back(k);
    return out;
}

void KeyValueConfig::require_all_recognized() const {
    const auto unknown = unknown_keys();
    if (unknown.empty()) return;
    std::string msg = "config: unknown key";
    if (unknown.size() > 1) msg += "s";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw config_error(msg);
}

std::string KeyValueConfig::resolved_text() const {
    std::string out;
    for (const auto& [k, v] : resolved_) out += k + " = " + v + "\n";
    return out;
}

// ---------------------------------------------------------------------------

RunConfig RunConfig::read(KeyValueConfig& kv) {
    RunConfig rc;
    rc.dataset = kv.get_string("dataset", "");
    rc.out = kv.get_string("out", "");
    rc.seed = kv.get_u64("seed", rc.seed);
    rc.threads = kv.get_int("threads", rc.threads);

    rc.width = kv.get_int("width", rc.width);
    rc.height = kv.get_int("height", rc.height);
    rc.focal = kv.get_double("focal", rc.focal);
    rc.traj.n_train = kv.get_int("views_train", rc.traj.n_train);
    rc.traj.n_val = kv.get_int("views_val", rc.traj.n_val);
    rc.traj.distance = kv.get_double("distance", rc.traj.distance);
    rc.traj.span_deg = kv.get_double("span_deg", rc.traj.span_deg);
    rc.traj.jitter = kv.get_double("pose_jitter", rc.traj.jitter);
    rc.traj.target = kv.get_vec3("target", rc.traj.target);
    rc.traj.t_near = kv.get_double("t_near", rc.traj.t_near);
    rc.traj.t_far = kv.get_double("t_far", rc.traj.t_far);

    const std::string medium = kv.get_string("medium", "underwater");
    if (medium == "underwater") rc.medium = MediumSpec::underwater_preset();
    else if (medium == "fog") rc.medium = MediumSpec::fog_preset();
    else if (medium == "none") rc.medium = MediumSpec::none();
    else throw config_error("config: medium must be underwater, fog, or none: " + medium);
    auto get_rgb = [&kv](const char* key, Rgb<double>& slot) {
        const Vec3 v = kv.get_vec3(key, {slot[0], slot[1], slot[2]});
        slot = {v.x, v.y, v.z};
    };
    get_rgb("beta_d", rc.medium.water.beta_d);
    get_rgb("beta_b", rc.medium.water.beta_b);
    get_rgb("b_inf", rc.medium.water.b_inf);
    rc.medium.fog_beta = kv.get_double("fog_beta", rc.medium.fog_beta);
    get_rgb("airlight", rc.medium.airlight);

    rc.field.l_pos = kv.get_int("l_pos", rc.field.l_pos);
    rc.field.l_dir = kv.get_int("l_dir", rc.field.l_dir);
    rc.field.trunk_depth = kv.get_int("trunk_depth", rc.field.trunk_depth);
    rc.field.trunk_width = kv.get_int("trunk_width", rc.field.trunk_width);
    rc.field.skip_layer = kv.get_int("skip_layer", rc.field.skip_layer);
    rc.field.color_width = kv.get_int("color_width", rc.field.color_width);
    rc.field.medium_depth = kv.get_int("medium_depth", rc.field.medium_depth);
    rc.field.medium_width = kv.get_int("medium_width", rc.field.medium_width);
    rc.field.medium_mode = medium_mode_from_name(
        kv.get_string("medium_mode", medium_mode_name(rc.field.medium_mode)));
    rc.field.density_init_sigma = kv.get_double("density_init_sigma", rc.field.density_init_sigma);
    rc.field.medium_init_sigma = kv.get_double("medium_init_sigma", rc.field.medium_init_sigma);

    // desk-scale defaults for the CLI: 64+64 samples, 1024-ray batches
    rc.train.sampling.n_coarse = kv.get_int("n_coarse", 64);
    rc.train.sampling.n_fine = kv.get_int("n_fine", 64);
    rc.train.sampling.jitter = kv.get_bool("jitter", rc.train.sampling.jitter);
    rc.train.batch_rays = kv.get_int("batch_rays", 1024);
    rc.train.optim.lr_peak = kv.get_double("lr_peak", rc.train.optim.lr_peak);
    rc.train.optim.lr_final = kv.get_double("lr_final", rc.train.optim.lr_final);
    rc.train.optim.warmup_iters = kv.get_int("warmup_iters", rc.train.optim.warmup_iters);
    rc.train.optim.total_iters = kv.get_int("iterations", rc.train.optim.total_iters);
    rc.train.optim.clip_norm = kv.get_double("clip_norm", rc.train.optim.clip_norm);
    rc.train.loss.lambda_acc = kv.get_double("lambda_acc", rc.train.loss.lambda_acc);
    rc.train.loss.epsilon_recon = kv.get_double("eps_recon", rc.train.loss.epsilon_recon);
    rc.train.seed = rc.seed;
    rc.train.log_every = kv.get_int("log_every", rc.train.log_every);
    rc.checkpoint_every = kv.get_int("checkpoint_every", rc.checkpoint_every);

    rc.validate();
    return rc;
}

CameraIntrinsics RunConfig::intrinsics() const {
    CameraIntrinsics in;
    in.width = width;
    in.height = height;
    in.fx = in.fy = focal;
    in.cx = width / 2.0;
    in.cy = height / 2.0;
    return in;
}

void RunConfig::validate() const {
    if (width < 8 || height < 8) throw config_error("config: image size must be at least 8x8");
    if (!(focal > 0)) throw config_error("config: focal must be positive");
    if (threads < 1) throw config_error("config: threads must be positive");
    if (checkpoint_every < 0) throw config_error("config: checkpoint_every must be nonnegative");
    traj.validate();
    medium.validate();
    field.validate();
    train.validate();
}

}  // namespace sfield
