// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#include "sfield/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fs = std::filesystem;

namespace sfield {

namespace {

std::string view_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d.pfm", i);
    return buf;
}

void hash_image(Fnv1a& h, const std::vector<double>& data) {
    for (double v : data) {
        const float f = float(v);
        h.update(&f, sizeof f);
    }
}

void hash_double(Fnv1a& h, double v) { h.update(&v, sizeof v); }

std::string compute_hash(const Dataset& ds) {
    Fnv1a h;
    h.update("sfield-dataset");
    hash_double(h, double(ds.seed));
    hash_double(h, ds.t_near);
    hash_double(h, ds.t_far);
    h.update(medium_to_text(ds.medium));
    for (const auto& v : ds.views) {
        h.update(v.camera.image);
        const auto& in = v.camera.intrinsics;
        for (double d : {in.fx, in.fy, in.cx, in.cy, double(in.width), double(in.height)})
            hash_double(h, d);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) hash_double(h, v.camera.pose.r[r][c]);
        for (int c = 0; c < 3; ++c) hash_double(h, v.camera.pose.t[c]);
        h.update(v.held_out ? "val" : "train");
        hash_image(h, v.clean.data);
        hash_image(h, v.degraded.data);
        hash_image(h, v.depth.data);
    }
    return h.hex();
}

std::ostream& triple(std::ostream& os, const Rgb<double>& v) {
    return os << v[0] << ' ' << v[1] << ' ' << v[2];
}

Rgb<double> parse_triple(std::istringstream& is, const char* what) {
    Rgb<double> v;
    if (!(is >> v[0] >> v[1] >> v[2]))
        throw io_error(std::string("medium.txt: malformed ") + what);
    return v;
}

}  // namespace

void TrajectoryConfig::validate() const {
    if (n_train < 4 || n_val < 1)
        throw config_error("trajectory: need at least 4 training and 1 held-out view");
    if (!(distance > 0) || !(span_deg > 0) || span_deg >= 180)
        throw config_error("trajectory: bad arc geometry");
    if (!(jitter >= 0)) throw config_error("trajectory: negative jitter");
    if (!(t_near > 0 && t_near < t_far)) throw config_error("trajectory: need 0 < t_near < t_far");
}

void MediumSpec::validate() const {
    switch (kind) {
        case MediumKind::kNone: return;
        case MediumKind::kUnderwater: water.validate(); return;
        case MediumKind::kFog:
            if (!(fog_beta >= 0)) throw config_error("medium: fog beta must be >= 0");
            for (double a : airlight)
                if (!(a >= 0 && a <= 1)) throw config_error("medium: airlight must lie in [0,1]");
            return;
    }
    throw config_error("medium: unknown kind");
}

MediumSpec MediumSpec::none() { return {}; }

MediumSpec MediumSpec::underwater_preset() {
    MediumSpec m;
    m.kind = MediumKind::kUnderwater;
    m.water.beta_d = {1.3, 1.2, 0.9};
    m.water.beta_b = {0.95, 0.85, 0.7};
    m.water.b_inf = {0.07, 0.2, 0.39};
    return m;
}

MediumSpec MediumSpec::fog_preset() {
    MediumSpec m;
    m.kind = MediumKind::kFog;
    m.fog_beta = 1.2;
    m.airlight = {1, 1, 1};
    return m;
}

std::string medium_to_text(const MediumSpec& m) {
    std::ostringstream os;
    os << std::setprecision(17);
    switch (m.kind) {
        case MediumKind::kNone: os << "kind none\n"; break;
        case MediumKind::kUnderwater:
            os << "kind underwater\n";
            triple(os << "beta_d ", m.water.beta_d) << "\n";
            triple(os << "beta_b ", m.water.beta_b) << "\n";
            triple(os << "b_inf ", m.water.b_inf) << "\n";
            break;
        case MediumKind::kFog:
            os << "kind fog\n";
            os << "beta " << m.fog_beta << "\n";
            triple(os << "airlight ", m.airlight) << "\n";
            break;
    }
    return os.str();
}

MediumSpec medium_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    MediumSpec m;
    bool have_kind = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "kind") {
            std::string k;
            ls >> k;
            if (k == "none")
                m.kind = MediumKind::kNone;
            else if (k == "underwater")
                m.kind = MediumKind::kUnderwater;
            else if (k == "fog")
                m.kind = MediumKind::kFog;
            else
                throw io_error("medium.txt: unknown kind '" + k + "'");
            have_kind = true;
        } else if (key == "beta_d") {
            m.water.beta_d = parse_triple(ls, "beta_d");
        } else if (key == "beta_b") {
            m.water.beta_b = parse_triple(ls, "beta_b");
        } else if (key == "b_inf") {
            m.water.b_inf = parse_triple(ls, "b_inf");
        } else if (key == "beta") {
            if (!(ls >> m.fog_beta)) throw io_error("medium.txt: malformed beta");
        } else if (key == "airlight") {
            m.airlight = parse_triple(ls, "airlight");
        } else {
            throw io_error("medium.txt: unknown key '" + key + "'");
        }
    }
    if (!have_kind) throw io_error("medium.txt: missing kind");
    m.validate();
    return m;
}

std::vector<int> Dataset::train_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < views.size(); ++i)
        if (!views[i].held_out) out.push_back(int(i));
    return out;
}

std::vector<int> Dataset::val_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < views.size(); ++i)
        if (views[i].held_out) out.push_back(int(i));
    return out;
}

int Dataset::central_view() const {
    if (views.empty()) throw config_error("dataset: no views");
    Vec3 mean{0, 0, 0};
    std::vector<Vec3> axes;
    for (const auto& v : views) {
        axes.push_back(v.camera.pose.rotate({0, 0, -1}));
        mean = mean + axes.back();
    }
    int best = 0;
    double best_dot = -2;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const double d = dot(normalized(mean), axes[i]);
        if (d > best_dot) {
            best_dot = d;
            best = int(i);
        }
    }
    return best;
}

Dataset build_dataset(const AnalyticScene& scene, const CameraIntrinsics& intr,
                      const TrajectoryConfig& traj, const MediumSpec& medium,
                      std::uint64_t seed) {
    intr.validate();
    traj.validate();
    medium.validate();

    Dataset ds;
    ds.medium = medium;
    ds.seed = seed;
    ds.t_near = traj.t_near;
    ds.t_far = traj.t_far;

    const int n = traj.n_train + traj.n_val;
    std::vector<bool> is_val(std::size_t(n), false);
    for (int j = 0; j < traj.n_val; ++j)
        is_val[std::size_t((2 * j + 1) * n / (2 * traj.n_val))] = true;

    RngStream rng(seed);
    const double span = traj.span_deg * M_PI / 180.0;
    for (int k = 0; k < n; ++k) {
        const double theta = span * (n == 1 ? 0.0 : double(k) / (n - 1) - 0.5);
        Vec3 pos = traj.target +
                   Vec3{std::sin(theta), 0.0, std::cos(theta)} * traj.distance;
        pos = pos + Vec3{uniform(rng, -traj.jitter, traj.jitter),
                         uniform(rng, -traj.jitter, traj.jitter),
                         uniform(rng, -traj.jitter, traj.jitter)};

        DatasetView view;
        view.camera.image = view_name(k);
        view.camera.intrinsics = intr;
        view.camera.pose = Pose::look_at(pos, traj.target, {0, 1, 0});
        view.held_out = is_val[std::size_t(k)];

        RGBDImage rt = raytrace_clean(scene, intr, view.camera.pose);
        quantize_f32(rt.rgb);
        quantize_f32(rt.depth);
        view.clean = rt.rgb;
        view.depth = rt.depth;
        switch (medium.kind) {
            case MediumKind::kNone: view.degraded = view.clean; break;
            case MediumKind::kUnderwater: view.degraded = apply_medium(rt, medium.water); break;
            case MediumKind::kFog:
                view.degraded = apply_fog(rt, medium.fog_beta, medium.airlight);
                break;
        }
        quantize_f32(view.degraded);
        ds.views.push_back(std::move(view));
    }
    ds.content_hash = compute_hash(ds);
    return ds;
}

void write_dataset(const std::string& dir, const Dataset& ds, bool force) {
    const fs::path root(dir);
    if (fs::exists(root) && !fs::is_empty(root) && !force)
        throw config_error("output directory exists and is not empty (use force): " + dir);
    fs::create_directories(root / "clean");
    fs::create_directories(root / "degraded");
    fs::create_directories(root / "depth");

    std::vector<PosedCamera> cams;
    for (const auto& v : ds.views) {
        write_pfm((root / "clean" / v.camera.image).string(), v.clean);
        write_pfm((root / "degraded" / v.camera.image).string(), v.degraded);
        write_pfm((root / "depth" / v.camera.image).string(), v.depth);
        cams.push_back(v.camera);
    }
    write_pose_file((root / "poses.txt").string(), cams);

    {
        std::ofstream f(root / "medium.txt");
        f << medium_to_text(ds.medium);
        if (!f) throw io_error("cannot write medium.txt");
    }

    std::ofstream mf(root / "manifest.txt");
    mf << std::setprecision(17);
    mf << "format sfield-dataset 1\n";
    mf << "seed " << ds.seed << "\n";
    mf << "width " << (ds.views.empty() ? 0 : ds.views[0].camera.intrinsics.width) << "\n";
    mf << "height " << (ds.views.empty() ? 0 : ds.views[0].camera.intrinsics.height) << "\n";
    mf << "t_near " << ds.t_near << "\n";
    mf << "t_far " << ds.t_far << "\n";
    mf << "views " << ds.views.size() << "\n";
    mf << "train";
    for (int i : ds.train_indices()) mf << ' ' << i;
    mf << "\nval";
    for (int i : ds.val_indices()) mf << ' ' << i;
    mf << "\nhash " << ds.content_hash << "\n";
    if (!mf) throw io_error("cannot write manifest.txt");
}

Dataset load_dataset(const std::string& dir) {
    const fs::path root(dir);
    std::ifstream mf(root / "manifest.txt");
    if (!mf) throw io_error("missing manifest.txt in " + dir);

    Dataset ds;
    std::size_t n_views = 0;
    std::vector<int> val;
    std::string recorded_hash;
    std::string line;
    while (std::getline(mf, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "format") {
            std::string name;
            int ver = 0;
            ls >> name >> ver;
            if (name != "sfield-dataset" || ver != 1)
                throw io_error("manifest.txt: unsupported format");
        } else if (key == "seed") {
            ls >> ds.seed;
        } else if (key == "t_near") {
            ls >> ds.t_near;
        } else if (key == "t_far") {
            ls >> ds.t_far;
        } else if (key == "views") {
            ls >> n_views;
        } else if (key == "val") {
            int i;
            while (ls >> i) val.push_back(i);
        } else if (key == "train" || key == "width" || key == "height") {
            // redundant with poses.txt; kept for human readers
        } else if (key == "hash") {
            ls >> recorded_hash;
        } else {
            throw io_error("manifest.txt: unknown key '" + key + "'");
        }
    }
    if (n_views == 0) throw io_error("manifest.txt: no views");

    {
        std::ifstream f(root / "medium.txt");
        if (!f) throw io_error("missing medium.txt in " + dir);
        std::stringstream buf;
        buf << f.rdbuf();
        ds.medium = medium_from_text(buf.str());
    }

    std::vector<PosedCamera> cams = read_pose_file((root / "poses.txt").string());
    if (cams.size() != n_views) throw io_error("poses.txt: view count mismatch");
    for (std::size_t i = 0; i < cams.size(); ++i) {
        DatasetView v;
        v.camera = cams[i];
        v.clean = read_pfm3((root / "clean" / v.camera.image).string());
        v.degraded = read_pfm3((root / "degraded" / v.camera.image).string());
        v.depth = read_pfm1((root / "depth" / v.camera.image).string());
        v.held_out = std::find(val.begin(), val.end(), int(i)) != val.end();
        ds.views.push_back(std::move(v));
    }
    ds.content_hash = compute_hash(ds);
    if (!recorded_hash.empty() && recorded_hash != ds.content_hash)
        throw io_error("dataset content does not match its manifest hash");
    return ds;
}

}  // namespace sfield
