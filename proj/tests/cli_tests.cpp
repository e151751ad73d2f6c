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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "rismask/io.hpp"

namespace fs = std::filesystem;

namespace
{
    const fs::path &work_dir()
    {
        static const fs::path dir = [] {
            fs::path p = fs::temp_directory_path() /
                         ("rismask_cli_" + std::to_string(::getpid()));
            fs::remove_all(p);
            fs::create_directories(p);
            return p;
        }();
        return dir;
    }

    int run_cli(const std::string &args, const std::string &log_name = "out.log")
    {
        const std::string log = (work_dir() / log_name).string();
        const std::string cmd =
            std::string(RISMASK_CLI_PATH) + " " + args + " >" + log + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read_file(const fs::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    const std::string &scenario_path()
    {
        static const std::string path = [] {
            const fs::path p = work_dir() / "scenario.json";
            std::ofstream f(p);
            f << R"({
                "geometry": {"K": 4, "N": 8},
                "optimizer": {"tolerance": 1e-4, "rng_seed": 3},
                "simulation": {"duration": 2.0, "packet_rate": 500.0,
                               "snr_db": 20.0, "rng_seed": 11, "n_configs": 4,
                               "target_motion": {"kind": "sinusoid",
                                                 "amplitude": 0.005, "frequency": 0.5}}
            })";
            return p.string();
        }();
        return path;
    }
} // namespace

TEST_CASE("cli - help and version")
{
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("optimize") == 1); // missing required --config
}

TEST_CASE("cli optimize - result and nondecreasing trace")
{
    const std::string out = (work_dir() / "opt").string();
    REQUIRE(run_cli("optimize --config " + scenario_path() + " --out " + out) == 0);
    CHECK(fs::exists(out + "/result.json"));
    CHECK(fs::exists(out + "/manifest.json"));

    std::ifstream trace(out + "/objective_trace.csv");
    std::string line;
    std::getline(trace, line);
    REQUIRE(line == "iteration,objective");
    double prev = -1e300;
    while (std::getline(trace, line))
    {
        const double v = std::stod(line.substr(line.find(',') + 1));
        CHECK(v >= prev - 1e-9);
        prev = v;
    }
}

TEST_CASE("cli optimize - malformed config names the field, exit 1")
{
    const fs::path bad = work_dir() / "bad.json";
    {
        std::ofstream f(bad);
        f << R"({"geometry": {"K": -2}})";
    }
    CHECK(run_cli("optimize --config " + bad.string(), "bad.log") == 1);
    const std::string log = read_file(work_dir() / "bad.log");
    CHECK(log.find("error: validation:") != std::string::npos);
    CHECK(log.find("K") != std::string::npos);
}

TEST_CASE("cli optimize - onebit output entries are exactly +-1")
{
    const std::string out = (work_dir() / "opt1b").string();
    REQUIRE(run_cli("optimize --onebit --config " + scenario_path() + " --out " + out) == 0);
    const rismask::OptimizerResult res =
        rismask::load_optimizer_result(out + "/result.json");
    REQUIRE(res.pairs.size() == 4);
    for (const auto &p : res.pairs)
    {
        for (const std::complex<double> v : p.phi1)
            CHECK((v == std::complex<double>(1.0, 0.0) ||
                   v == std::complex<double>(-1.0, 0.0)));
        for (const std::complex<double> v : p.phi2)
            CHECK((v == std::complex<double>(1.0, 0.0) ||
                   v == std::complex<double>(-1.0, 0.0)));
    }
}

TEST_CASE("cli beampattern - emits the csv grid")
{
    const std::string opt = (work_dir() / "opt").string();
    const std::string out = (work_dir() / "bp").string();
    REQUIRE(run_cli("beampattern --config " + scenario_path() + " --result " + opt +
                    "/result.json --row 0 --angles -60:60:121 --out " + out) == 0);
    std::ifstream f(out + "/beampattern.csv");
    std::string line;
    std::getline(f, line);
    CHECK(line == "angle_deg,mag1,mag2,phase_diff_rad");
    int rows = 0;
    while (std::getline(f, line))
        ++rows;
    CHECK(rows == 121);

    CHECK(run_cli("beampattern --config " + scenario_path() + " --result " + opt +
                  "/result.json --row 9") == 1);
}

TEST_CASE("cli simulate - deterministic artifacts, then demask round trip")
{
    const std::string opt = (work_dir() / "opt").string();
    const std::string s1 = (work_dir() / "sim1").string();
    const std::string s2 = (work_dir() / "sim2").string();
    REQUIRE(run_cli("simulate --config " + scenario_path() + " --pairs " + opt +
                    "/result.json --out " + s1) == 0);
    REQUIRE(run_cli("simulate --config " + scenario_path() + " --pairs " + opt +
                    "/result.json --out " + s2) == 0);
    CHECK(read_file(s1 + "/legit.csi") == read_file(s2 + "/legit.csi"));
    CHECK(read_file(s1 + "/attacker.csi") == read_file(s2 + "/attacker.csi"));
    CHECK(read_file(s1 + "/key.json") == read_file(s2 + "/key.json"));
    CHECK(fs::exists(s1 + "/report.json"));
    CHECK(fs::exists(s1 + "/snr_series.csv"));

    // Missing pairs file is a validation failure.
    CHECK(run_cli("simulate --config " + scenario_path() + " --pairs " +
                  (work_dir() / "nope.json").string()) == 1);

    // Demask with the emitted key succeeds and reports a confident sync fit.
    const std::string dm = (work_dir() / "dm").string();
    REQUIRE(run_cli("demask --trace " + s1 + "/legit.csi --key " + s1 +
                    "/key.json --cutoff 2.0 --out " + dm) == 0);
    const std::string diag = read_file(dm + "/diagnostics.json");
    CHECK(diag.find("\"sync_low_confidence\": false") != std::string::npos);

    // Wrong-format key: validation error.
    const fs::path badkey = work_dir() / "badkey.json";
    {
        std::ofstream f(badkey);
        f << R"({"seed": 1})";
    }
    CHECK(run_cli("demask --trace " + s1 + "/legit.csi --key " + badkey.string()) == 1);

    // Trace shorter than two sync intervals: runtime error with stage.
    const fs::path shorttrace = work_dir() / "short.csi";
    {
        std::ifstream in(s1 + "/legit.csi");
        std::ofstream out_f(shorttrace);
        std::string line;
        for (int i = 0; i < 9000 && std::getline(in, line); ++i)
            out_f << line << "\n";
    }
    CHECK(run_cli("demask --trace " + shorttrace.string() + " --key " + s1 +
                  "/key.json", "short.log") == 2);
    const std::string slog = read_file(work_dir() / "short.log");
    CHECK(slog.find("error: runtime: demask_pipeline[detect_sync]") != std::string::npos);

    // Metrics against the emitted ground truth.
    const std::string mt = (work_dir() / "mt").string();
    REQUIRE(run_cli("metrics --recovered " + dm + "/cleaned.csi --truth " + s1 +
                    "/ground_truth.csi --fmax 2.0 --out " + mt) == 0);
    CHECK(read_file(mt + "/metrics.json").find("correlation") != std::string::npos);
}
