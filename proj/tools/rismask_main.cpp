// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rismask/io.hpp"
#include "rismask/rng.hpp"

namespace fs = std::filesystem;
using namespace rismask;

namespace
{
    constexpr const char *k_version = "rismask 0.1.0";

    std::string out_path(const std::string &dir, const std::string &name)
    {
        fs::create_directories(dir);
        return (fs::path(dir) / name).string();
    }

    arma::vec parse_angle_grid(const std::string &spec)
    {
        double lo = 0.0, hi = 0.0;
        int count = 0;
        char c1, c2;
        std::istringstream ss(spec);
        if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1)
            throw std::invalid_argument("--angles must be 'lo_deg:hi_deg:count'");
        if (lo <= -90.0 || hi >= 90.0 || hi < lo)
            throw std::invalid_argument("--angles must stay inside (-90, 90) degrees");
        return arma::linspace(lo * M_PI / 180.0, hi * M_PI / 180.0, count);
    }

    MaskingKey key_for_scenario(const ScenarioFile &sf, std::uint64_t seed)
    {
        if (sf.has_key)
            return sf.key;
        return make_key(sf.geometry.row_count, sf.key_n_configs,
                        Rng::derive_seed(seed, 0x6b));
    }

    int run_optimize(const std::string &config, const std::string &out,
                     bool onebit, std::optional<std::uint64_t> seed)
    {
        ScenarioFile sf = load_scenario_file(config);
        if (seed)
            sf.optimizer.rng_seed = *seed;
        sf.optimizer.onebit = onebit;

        const RowChannels rows = effective_channels(sf.geometry, tx_ris_channel(sf.geometry));
        const OptimizerResult res = onebit ? onebit_optimize(rows, sf.optimizer)
                                           : bcd_optimize(rows, sf.optimizer);
        save_optimizer_result(res, out_path(out, "result.json"));
        save_objective_trace_csv(res.objective_trace, out_path(out, "objective_trace.csv"));
        save_manifest({{"command", "optimize"},
                       {"config", config},
                       {"seed", std::to_string(sf.optimizer.rng_seed)},
                       {"onebit", onebit ? "true" : "false"},
                       {"version", k_version}},
                      out_path(out, "manifest.json"));
        std::cout << "optimize: " << (res.converged ? "converged" : "max iterations")
                  << " after " << res.iterations << " iterations, objective "
                  << (res.objective_trace.empty() ? 0.0 : res.objective_trace.back())
                  << "\n";
        return 0;
    }

    int run_beampattern(const std::string &config, const std::string &result_file,
                        const std::string &out, int row, const std::string &angles)
    {
        const ScenarioFile sf = load_scenario_file(config);
        const OptimizerResult res = load_optimizer_result(result_file);
        if (row < 0 || row >= static_cast<int>(res.pairs.size()))
            throw std::invalid_argument("--row out of range for the result file");

        const arma::cx_mat h_tx = tx_ris_channel(sf.geometry);
        const auto pts = beampattern(res.pairs[row], h_tx.col(row),
                                     sf.geometry.element_spacing, parse_angle_grid(angles));
        save_beampattern_csv(pts, out_path(out, "beampattern.csv"));
        std::cout << "beampattern: wrote " << pts.size() << " angles for row " << row << "\n";
        return 0;
    }

    int run_schedule(const std::string &key_file, double duration, const std::string &out)
    {
        const MaskingKey key = load_key(key_file);
        const MaskingSchedule sched = build_schedule(key, duration);
        save_schedule(sched, out_path(out, "schedule.csv"));
        std::cout << "schedule: " << sched.slots.size() << " slots over " << duration
                  << " s\n";
        return 0;
    }

    int run_simulate(const std::string &config, const std::string &pairs_file,
                     const std::string &key_file, const std::string &out,
                     std::optional<std::uint64_t> seed)
    {
        ScenarioFile sf = load_scenario_file(config);
        if (seed)
            sf.scenario.rng_seed = *seed;

        const OptimizerResult res = load_optimizer_result(pairs_file);
        Scenario sc = sf.scenario;
        sc.pairs = res.pairs;
        sc.key = key_file.empty() ? key_for_scenario(sf, sc.rng_seed) : load_key(key_file);

        const SimOutput sim = run_scenario(sc);
        const DemaskParams params;
        const RunReport report = evaluate(sim, sc, params);

        save_trace(sim.legit, out_path(out, "legit.csi"));
        save_trace(sim.attacker, out_path(out, "attacker.csi"));
        CsiTrace truth;
        truth.samples.reserve(sim.truth_t.size());
        for (std::size_t i = 0; i < sim.truth_t.size(); ++i)
            truth.samples.push_back(
                {sim.truth_t[i], arma::cx_mat(1, 1, arma::fill::value(sim.truth(i)))});
        save_trace(truth, out_path(out, "ground_truth.csi"));
        save_schedule(sim.schedule, out_path(out, "schedule.csv"));
        save_key(sc.key, out_path(out, "key.json"));
        save_snr_series_csv(sim.packet_times, sim.snr_series_db,
                            out_path(out, "snr_series.csv"));
        save_run_report(report, out_path(out, "report.json"));
        save_manifest({{"command", "simulate"},
                       {"config", config},
                       {"pairs", pairs_file},
                       {"seed", std::to_string(sc.rng_seed)},
                       {"version", k_version}},
                      out_path(out, "manifest.json"));
        std::cout << "simulate: " << sim.legit.samples.size()
                  << " packets, legit correlation " << report.legit_correlation
                  << ", wrong-key correlation " << report.attacker_correlation << "\n";
        return 0;
    }

    int run_demask(const std::string &trace_file, const std::string &key_file,
                   const std::string &out, const DemaskParams &params)
    {
        const CsiTrace trace = load_trace(trace_file);
        const MaskingKey key = load_key(key_file);
        const DemaskOutput res = demask_pipeline(trace, key, params);
        save_merged_series(res.cleaned, out_path(out, "cleaned.csi"));
        save_diagnostics(res.diagnostics, out_path(out, "diagnostics.json"));
        std::cout << "demask: " << res.cleaned.t.size() << " samples, sync residual "
                  << res.diagnostics.sync.residual << " s\n";
        return 0;
    }

    int run_metrics(const std::string &recovered_file, const std::string &truth_file,
                    const std::string &out, double match_tol, double fmax)
    {
        const CsiTrace rec = load_trace(recovered_file);
        const CsiTrace tru = load_trace(truth_file);
        if (tru.samples.empty() || tru.antennas() != 1 || tru.subcarriers() != 1)
            throw std::invalid_argument("--truth must be a single-stream trace");

        MergedSeries series;
        for (const auto &s : rec.samples)
        {
            series.t.push_back(s.timestamp);
            series.v.push_back(s.csi);
        }
        std::vector<double> tt;
        arma::cx_vec tv(tru.samples.size());
        for (std::size_t i = 0; i < tru.samples.size(); ++i)
        {
            tt.push_back(tru.samples[i].timestamp);
            tv(i) = tru.samples[i].csi(0, 0);
        }
        const double corr = truth_correlation(series, tt, tv, match_tol);
        const SpectralPeak peak = dominant_peak(series, fmax);

        std::ostringstream doc;
        doc << "{\n  \"correlation\": " << corr << ",\n  \"peak_hz\": " << peak.freq_hz
            << ",\n  \"peak_prominence\": " << peak.prominence << "\n}\n";
        fs::create_directories(out);
        std::ofstream f(fs::path(out) / "metrics.json");
        f << doc.str();
        std::cout << "metrics: correlation " << corr << ", peak " << peak.freq_hz
                  << " Hz\n";
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"RIS-assisted ISAC masking simulator and beamforming toolkit"};
    app.set_version_flag("--version", k_version);
    app.require_subcommand(1);

    std::string config, out = ".", result_file, key_file, trace_file;
    std::string pairs_file, recovered_file, truth_file;
    std::string angles = "-89:89:357";
    bool onebit = false;
    int row = 0;
    double duration = 10.0;
    double match_tol = 1e-3, fmax = 1.0;
    std::optional<std::uint64_t> seed;
    DemaskParams params;

    auto *opt = app.add_subcommand("optimize", "Design the per-row beam vector pairs");
    opt->add_option("--config", config, "Scenario configuration file")->required();
    opt->add_option("--out", out, "Output directory");
    opt->add_flag("--onebit", onebit, "Restrict reflection coefficients to +-1");
    opt->add_option("--seed", seed, "Override the optimizer seed");

    auto *bp = app.add_subcommand("beampattern", "Row response over an angle grid");
    bp->add_option("--config", config, "Scenario configuration file")->required();
    bp->add_option("--result", result_file, "Optimizer result file")->required();
    bp->add_option("--out", out, "Output directory");
    bp->add_option("--row", row, "RIS row index");
    bp->add_option("--angles", angles, "Angle grid 'lo_deg:hi_deg:count'");

    auto *sch = app.add_subcommand("schedule", "Masking schedule from a key");
    sch->add_option("--key", key_file, "Masking key file")->required();
    sch->add_option("--duration", duration, "Schedule span in seconds")->required();
    sch->add_option("--out", out, "Output directory");

    auto *sim = app.add_subcommand("simulate", "End-to-end masked-scenario run");
    sim->add_option("--config", config, "Scenario configuration file")->required();
    sim->add_option("--pairs", pairs_file, "Optimizer result file")->required();
    sim->add_option("--key", key_file, "Masking key file (derived when absent)");
    sim->add_option("--out", out, "Output directory");
    sim->add_option("--seed", seed, "Override the scenario seed");

    auto *dem = app.add_subcommand("demask", "Keyed CSI reconstruction");
    dem->add_option("--trace", trace_file, "CSI trace file")->required();
    dem->add_option("--key", key_file, "Masking key file")->required();
    dem->add_option("--out", out, "Output directory");
    dem->add_option("--coherence-gap", params.coherence_gap, "Adjacent-pair gap, seconds");
    dem->add_option("--guard", params.guard_fraction, "Guard fraction of a slot");
    dem->add_option("--cutoff", params.cutoff_hz, "Low-pass cutoff, Hz");
    dem->add_option("--cv-window", params.cv_window, "CV window, seconds (0: 3*T_ris)");

    auto *met = app.add_subcommand("metrics", "Score a recovered trace against truth");
    met->add_option("--recovered", recovered_file, "Recovered CSI trace")->required();
    met->add_option("--truth", truth_file, "Ground-truth trace")->required();
    met->add_option("--out", out, "Output directory");
    met->add_option("--match-tol", match_tol, "Timestamp match tolerance, seconds");
    met->add_option("--fmax", fmax, "Spectral search limit, Hz");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::cerr << "error: validation: " << e.what() << "\n";
        return 1;
    }

    try
    {
        if (opt->parsed())
            return run_optimize(config, out, onebit, seed);
        if (bp->parsed())
            return run_beampattern(config, result_file, out, row, angles);
        if (sch->parsed())
            return run_schedule(key_file, duration, out);
        if (sim->parsed())
            return run_simulate(config, pairs_file, key_file, out, seed);
        if (dem->parsed())
            return run_demask(trace_file, key_file, out, params);
        if (met->parsed())
            return run_metrics(recovered_file, truth_file, out, match_tol, fmax);
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: validation: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: runtime: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
