// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sfield/dataset.hpp"
#include "sfield/trainer.hpp"

namespace sfield {

/// Flat `key = value` run configuration. Lines hold one pair each, `#` starts
/// a comment, values are strings, numbers, booleans, or space-separated
/// numeric triples. Typed getters record the resolved value (default or not)
/// so the full effective configuration can be echoed into the run directory;
/// keys that are never read are reported as errors.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_text(const std::string& text);

    /// Sets (or overrides) a raw value, as CLI flags do.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& def);
    double get_double(const std::string& key, double def);
    int get_int(const std::string& key, int def);
    std::uint64_t get_u64(const std::string& key, std::uint64_t def);
    bool get_bool(const std::string& key, bool def);
    Vec3 get_vec3(const std::string& key, const Vec3& def);

    /// Keys present in the source that no getter ever consumed.
    std::vector<std::string> unknown_keys() const;
    /// Throws config_error naming every unknown key.
    void require_all_recognized() const;

    /// Every consumed key with its resolved value, in first-read order.
    std::string resolved_text() const;

  private:
    std::string take(const std::string& key, const std::string& def, bool* present = nullptr);
    void record(const std::string& key, const std::string& resolved);

    std::vector<std::pair<std::string, std::string>> raw_;       // source order
    std::vector<std::pair<std::string, std::string>> resolved_;  // read order
    std::vector<std::string> read_;
};

/// Everything a pipeline run needs: where the data lives, how the synthetic
/// capture is produced, the model shape, and the training schedule. Defaults
/// are the desk-scale setup (128x96 views, 12 train + 3 held out, 64+64
/// samples, 1024-ray batches, 20k iterations).
struct RunConfig {
    std::string dataset;  // dataset directory (input for train/eval, output for simulate)
    std::string out;      // run directory
    std::uint64_t seed = 0;
    int threads = 1;

    // synthetic capture
    int width = 128, height = 96;
    double focal = 140.0;
    TrajectoryConfig traj;
    MediumSpec medium = MediumSpec::underwater_preset();

    FieldConfig field;
    TrainConfig train;
    int checkpoint_every = 5000;

    /// Reads every key from `kv` (so unknown-key detection works), validates,
    /// and returns the assembled config. CLI overrides must be set on `kv`
    /// before this call.
    static RunConfig read(KeyValueConfig& kv);

    CameraIntrinsics intrinsics() const;
    void validate() const;
};

}  // namespace sfield
