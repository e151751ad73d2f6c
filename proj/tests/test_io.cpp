// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "rismask/io.hpp"
#include "rismask/rng.hpp"

using namespace rismask;
using cxd = std::complex<double>;
namespace fs = std::filesystem;

namespace
{
    struct TempDir
    {
        fs::path path;
        TempDir()
        {
            path = fs::temp_directory_path() /
                   ("rismask_io_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter()++));
            fs::create_directories(path);
        }
        ~TempDir() { fs::remove_all(path); }
        std::string file(const std::string &name) const { return (path / name).string(); }
        static int &counter()
        {
            static int c = 0;
            return c;
        }
    };
} // namespace

TEST_CASE("scenario file - defaults, explicit fields and error reporting")
{
    TempDir dir;
    {
        std::ofstream f(dir.file("scenario.json"));
        f << R"({
            "geometry": {"K": 4, "N": 8, "theta_sense_aod": 0.9, "pathloss_comm": [1,2,3,4]},
            "optimizer": {"omega1": 1.5, "tolerance": 1e-5},
            "simulation": {"duration": 3.5, "packet_rate": 400.0,
                           "target_motion": {"kind": "sinusoid", "amplitude": 0.004, "frequency": 0.3}}
        })";
    }
    const ScenarioFile sf = load_scenario_file(dir.file("scenario.json"));
    CHECK(sf.geometry.row_count == 4);
    CHECK(sf.geometry.elements_per_row == 8);
    CHECK(sf.geometry.theta_sense_aod == Catch::Approx(0.9));
    CHECK(sf.geometry.pathloss_comm(3) == 4.0);
    CHECK(sf.optimizer.omega1 == 1.5);
    CHECK(sf.optimizer.tolerance == 1e-5);
    CHECK(sf.scenario.duration == 3.5);
    CHECK(sf.scenario.packet_rate == 400.0);
    CHECK(sf.scenario.motion.freq_hz == 0.3);

    {
        std::ofstream f(dir.file("bad.json"));
        f << R"({"geometry": {"K": "eight"}})";
    }
    CHECK_THROWS_WITH(load_scenario_file(dir.file("bad.json")),
                      Catch::Matchers::ContainsSubstring("K"));

    {
        std::ofstream f(dir.file("broken.json"));
        f << "{ not json";
    }
    CHECK_THROWS_AS(load_scenario_file(dir.file("broken.json")), std::invalid_argument);
}

TEST_CASE("optimizer result - round trip")
{
    TempDir dir;
    Rng rng(3);
    OptimizerResult res;
    res.varphi = 1.234;
    res.converged = true;
    res.iterations = 7;
    res.objective_trace = {0.1, 0.5, 0.9};
    for (int k = 0; k < 3; ++k)
    {
        BeamVectorPair p;
        p.phi1.set_size(4);
        p.phi2.set_size(4);
        for (int n = 0; n < 4; ++n)
        {
            p.phi1(n) = rng.cnormal();
            p.phi2(n) = rng.cnormal();
        }
        res.pairs.push_back(p);
    }
    save_optimizer_result(res, dir.file("result.json"));
    const OptimizerResult back = load_optimizer_result(dir.file("result.json"));
    CHECK(back.varphi == res.varphi);
    CHECK(back.converged == res.converged);
    CHECK(back.iterations == res.iterations);
    REQUIRE(back.pairs.size() == 3);
    for (int k = 0; k < 3; ++k)
    {
        CHECK(arma::norm(back.pairs[k].phi1 - res.pairs[k].phi1) == 0.0);
        CHECK(arma::norm(back.pairs[k].phi2 - res.pairs[k].phi2) == 0.0);
    }
}

TEST_CASE("masking key - round trip and validation on load")
{
    TempDir dir;
    const MaskingKey key = make_key(6, 4, 99);
    save_key(key, dir.file("key.json"));
    const MaskingKey back = load_key(dir.file("key.json"));
    CHECK(back.seed == key.seed);
    CHECK(back.t_ris == key.t_ris);
    CHECK(back.t_sync == key.t_sync);
    CHECK(back.sync_len == key.sync_len);
    REQUIRE(back.candidates.size() == key.candidates.size());
    for (std::size_t i = 0; i < key.candidates.size(); ++i)
        CHECK(back.candidates[i] == key.candidates[i]);
    CHECK(back.sync_config == key.sync_config);

    {
        std::ofstream f(dir.file("badkey.json"));
        f << R"({"T_ris": 0.002, "T_sync": 0.5, "sync_len": 3,
                 "candidates": [[0,1],[0,1]], "sync_config": [0,0]})";
    }
    CHECK_THROWS_AS(load_key(dir.file("badkey.json")), std::invalid_argument);
}

TEST_CASE("csi trace - round trip preserves every record")
{
    TempDir dir;
    Rng rng(7);
    CsiTrace trace;
    for (int i = 0; i < 20; ++i)
    {
        arma::cx_mat m(3, 5);
        for (auto &v : m)
            v = rng.cnormal();
        trace.samples.push_back({1e-3 * (i + 1), m});
    }
    save_trace(trace, dir.file("trace.csi"));
    const CsiTrace back = load_trace(dir.file("trace.csi"));
    REQUIRE(back.samples.size() == trace.samples.size());
    for (std::size_t i = 0; i < trace.samples.size(); ++i)
    {
        CHECK(back.samples[i].timestamp ==
              Catch::Approx(trace.samples[i].timestamp).margin(1e-9));
        CHECK(arma::abs(back.samples[i].csi - trace.samples[i].csi).max() < 1e-15);
    }

    CHECK_THROWS_AS(load_trace(dir.file("missing.csi")), std::invalid_argument);
    {
        std::ofstream f(dir.file("garbage.csi"));
        f << "1000,0,0,1.0\n"; // missing imaginary column
    }
    CHECK_THROWS_AS(load_trace(dir.file("garbage.csi")), std::invalid_argument);
}

TEST_CASE("schedule and csv emissions - shapes and headers")
{
    TempDir dir;
    const MaskingKey key = make_key(4, 4, 5, 2e-3, 0.1, 3);
    const MaskingSchedule sched = build_schedule(key, 0.3);
    save_schedule(sched, dir.file("schedule.csv"));
    std::ifstream f(dir.file("schedule.csv"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(f, line))
    {
        if (lines == 0)
            CHECK(line == "0,"+ std::to_string(sched.slots[0].config_index) + ",0");
        ++lines;
    }
    CHECK(lines == sched.slots.size());

    save_objective_trace_csv({1.0, 2.0}, dir.file("trace.csv"));
    std::ifstream tf(dir.file("trace.csv"));
    std::getline(tf, line);
    CHECK(line == "iteration,objective");

    std::vector<BeampatternPoint> pts(2);
    pts[0].angle_rad = 0.1;
    save_beampattern_csv(pts, dir.file("pattern.csv"));
    std::ifstream pf(dir.file("pattern.csv"));
    std::getline(pf, line);
    CHECK(line == "angle_deg,mag1,mag2,phase_diff_rad");
}
