// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sfield/config.hpp"

using namespace sfield;

TEST_CASE("key=value parsing handles comments, blanks, and all value types") {
    KeyValueConfig kv = KeyValueConfig::from_text(
        "# a comment line\n"
        "\n"
        "name = run-a   # trailing comment\n"
        "count = 42\n"
        "rate = 2.5e-3\n"
        "flag = true\n"
        "triple = 1.5 -2 0.25\n");
    CHECK(kv.get_string("name", "") == "run-a");
    CHECK(kv.get_int("count", 0) == 42);
    CHECK(kv.get_double("rate", 0) == doctest::Approx(2.5e-3));
    CHECK(kv.get_bool("flag", false));
    const Vec3 t = kv.get_vec3("triple", {});
    CHECK(t.x == 1.5);
    CHECK(t.y == -2.0);
    CHECK(t.z == 0.25);
    CHECK(kv.unknown_keys().empty());
}

TEST_CASE("defaults are used for absent keys and recorded in the echo") {
    KeyValueConfig kv = KeyValueConfig::from_text("present = 7\n");
    CHECK(kv.get_int("present", 1) == 7);
    CHECK(kv.get_int("absent", 33) == 33);
    CHECK(kv.get_bool("absent_flag", true));
    const std::string echo = kv.resolved_text();
    CHECK(echo.find("present = 7\n") != std::string::npos);
    CHECK(echo.find("absent = 33\n") != std::string::npos);
    CHECK(echo.find("absent_flag = true\n") != std::string::npos);
}

TEST_CASE("the resolved echo reparses to the same values") {
    KeyValueConfig kv = KeyValueConfig::from_text("lr = 5e-4\nmode = six\n");
    kv.get_double("lr", 0);
    kv.get_string("mode", "");
    kv.get_vec3("target", {0, 0, -4});
    KeyValueConfig again = KeyValueConfig::from_text(kv.resolved_text());
    CHECK(again.get_double("lr", 0) == 5e-4);
    CHECK(again.get_string("mode", "") == "six");
    const Vec3 t = again.get_vec3("target", {});
    CHECK(t.z == -4.0);
    CHECK(again.unknown_keys().empty());
}

TEST_CASE("unknown keys and malformed values are rejected") {
    KeyValueConfig kv = KeyValueConfig::from_text("known = 1\nmystery = 2\ntypo_key = x\n");
    kv.get_int("known", 0);
    const auto unknown = kv.unknown_keys();
    REQUIRE(unknown.size() == 2);
    CHECK(unknown[0] == "mystery");
    CHECK(unknown[1] == "typo_key");
    CHECK_THROWS_AS(kv.require_all_recognized(), config_error);

    KeyValueConfig bad = KeyValueConfig::from_text("n = twelve\n");
    CHECK_THROWS_AS(bad.get_int("n", 0), config_error);
    KeyValueConfig bad2 = KeyValueConfig::from_text("t = 1 2\n");
    CHECK_THROWS_AS(bad2.get_vec3("t", {}), config_error);
    KeyValueConfig bad3 = KeyValueConfig::from_text("b = maybe\n");
    CHECK_THROWS_AS(bad3.get_bool("b", false), config_error);
    CHECK_THROWS_AS(KeyValueConfig::from_text("no equals sign\n"), config_error);
}

TEST_CASE("overrides replace file values") {
    KeyValueConfig kv = KeyValueConfig::from_text("seed = 1\nout = from_file\n");
    kv.set("seed", "99");
    kv.set("extra", "5");
    CHECK(kv.get_u64("seed", 0) == 99);
    CHECK(kv.get_string("out", "") == "from_file");
    CHECK(kv.get_int("extra", 0) == 5);
}

TEST_CASE("run config exposes desk-scale defaults") {
    KeyValueConfig kv;
    RunConfig rc = RunConfig::read(kv);
    CHECK(rc.width == 128);
    CHECK(rc.height == 96);
    CHECK(rc.traj.n_train == 12);
    CHECK(rc.traj.n_val == 3);
    CHECK(rc.train.sampling.n_coarse == 64);
    CHECK(rc.train.sampling.n_fine == 64);
    CHECK(rc.train.batch_rays == 1024);
    CHECK(rc.train.optim.total_iters == 20000);
    CHECK(rc.medium.kind == MediumKind::kUnderwater);
    CHECK(rc.field.medium_mode == MediumMode::kSixParam);
    CHECK(kv.unknown_keys().empty());

    const CameraIntrinsics in = rc.intrinsics();
    CHECK(in.width == 128);
    CHECK(in.cx == 64.0);
    CHECK(in.cy == 48.0);
}

TEST_CASE("run config wires every section") {
    KeyValueConfig kv = KeyValueConfig::from_text(
        "dataset = /tmp/ds\n"
        "out = /tmp/run\n"
        "seed = 7\n"
        "medium = fog\n"
        "fog_beta = 0.8\n"
        "medium_mode = three\n"
        "n_coarse = 48\n"
        "n_fine = 24\n"
        "batch_rays = 192\n"
        "iterations = 2000\n"
        "lr_peak = 1e-3\n"
        "lambda_acc = 2e-4\n"
        "width = 64\n"
        "height = 48\n"
        "views_train = 6\n"
        "views_val = 2\n");
    RunConfig rc = RunConfig::read(kv);
    kv.require_all_recognized();
    CHECK(rc.dataset == "/tmp/ds");
    CHECK(rc.seed == 7);
    CHECK(rc.train.seed == 7);
    CHECK(rc.medium.kind == MediumKind::kFog);
    CHECK(rc.medium.fog_beta == 0.8);
    CHECK(rc.field.medium_mode == MediumMode::kThreeParam);
    CHECK(rc.train.sampling.n_coarse == 48);
    CHECK(rc.train.sampling.n_fine == 24);
    CHECK(rc.train.batch_rays == 192);
    CHECK(rc.train.optim.total_iters == 2000);
    CHECK(rc.train.optim.lr_peak == 1e-3);
    CHECK(rc.train.loss.lambda_acc == 2e-4);
    CHECK(rc.traj.n_train == 6);
    CHECK(rc.traj.n_val == 2);
}

TEST_CASE("run config validation rejects bad settings") {
    KeyValueConfig a = KeyValueConfig::from_text("medium = vacuum\n");
    CHECK_THROWS_AS(RunConfig::read(a), config_error);
    KeyValueConfig b = KeyValueConfig::from_text("width = 4\n");
    CHECK_THROWS_AS(RunConfig::read(b), config_error);
    KeyValueConfig c = KeyValueConfig::from_text("views_train = 2\n");
    CHECK_THROWS_AS(RunConfig::read(c), config_error);
    KeyValueConfig d = KeyValueConfig::from_text("iterations = -1\n");
    CHECK_THROWS_AS(RunConfig::read(d), config_error);
    KeyValueConfig e = KeyValueConfig::from_text("threads = 0\n");
    CHECK_THROWS_AS(RunConfig::read(e), config_error);
}

TEST_CASE("zero-iteration runs are a valid configuration") {
    KeyValueConfig kv = KeyValueConfig::from_text("iterations = 0\n");
    RunConfig rc = RunConfig::read(kv);
    CHECK(rc.train.optim.total_iters == 0);
}
