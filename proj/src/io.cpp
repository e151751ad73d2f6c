// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rismask/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rismask
{

    namespace
    {
        using nlohmann::json;

        json load_json(const std::string &path)
        {
            std::ifstream in(path);
            if (!in)
                throw std::invalid_argument("cannot open file: " + path);
            json j;
            try
            {
                in >> j;
            }
            catch (const json::parse_error &e)
            {
                throw std::invalid_argument("malformed document " + path + ": " + e.what());
            }
            return j;
        }

        void write_text(const std::string &path, const std::string &text)
        {
            std::ofstream out(path);
            if (!out)
                throw std::runtime_error("cannot write file: " + path);
            out << text;
        }

        template <typename T>
        T get_field(const json &j, const std::string &name, const T &fallback)
        {
            if (!j.contains(name))
                return fallback;
            try
            {
                return j.at(name).get<T>();
            }
            catch (const json::exception &)
            {
                throw std::invalid_argument("field '" + name + "' has the wrong type");
            }
        }

        template <typename T>
        T require_field(const json &j, const std::string &name)
        {
            if (!j.contains(name))
                throw std::invalid_argument("missing field '" + name + "'");
            try
            {
                return j.at(name).get<T>();
            }
            catch (const json::exception &)
            {
                throw std::invalid_argument("field '" + name + "' has the wrong type");
            }
        }

        json cx_vec_to_json(const arma::cx_vec &v)
        {
            // Interleaved [re0, im0, re1, im1, ...]
            json arr = json::array();
            for (const auto &c : v)
            {
                arr.push_back(c.real());
                arr.push_back(c.imag());
            }
            return arr;
        }

        arma::cx_vec cx_vec_from_json(const json &arr, const std::string &name)
        {
            if (!arr.is_array() || arr.size() % 2 != 0)
                throw std::invalid_argument("field '" + name +
                                            "' must be an interleaved real/imag array");
            arma::cx_vec v(arr.size() / 2);
            for (std::size_t i = 0; i < v.n_elem; ++i)
                v(i) = std::complex<double>(arr[2 * i].get<double>(),
                                            arr[2 * i + 1].get<double>());
            return v;
        }

        json key_to_json(const MaskingKey &key)
        {
            json j;
            j["seed"] = key.seed;
            j["T_ris"] = key.t_ris;
            j["T_sync"] = key.t_sync;
            j["sync_len"] = key.sync_len;
            json cands = json::array();
            for (const auto &c : key.candidates)
                cands.push_back(c.selection);
            j["candidates"] = cands;
            j["sync_config"] = key.sync_config.selection;
            return j;
        }

        MaskingKey key_from_json(const json &j)
        {
            MaskingKey key;
            key.seed = get_field<std::uint64_t>(j, "seed", 1);
            key.t_ris = require_field<double>(j, "T_ris");
            key.t_sync = require_field<double>(j, "T_sync");
            key.sync_len = require_field<int>(j, "sync_len");
            const json cands = require_field<json>(j, "candidates");
            if (!cands.is_array() || cands.empty())
                throw std::invalid_argument("field 'candidates' must be a non-empty array");
            for (const auto &c : cands)
                key.candidates.push_back(
                    RisConfiguration{c.get<std::vector<std::uint8_t>>()});
            key.sync_config.selection =
                require_field<std::vector<std::uint8_t>>(j, "sync_config");
            key.validate();
            return key;
        }
    } // namespace

    ScenarioFile load_scenario_file(const std::string &path)
    {
        const json j = load_json(path);
        ScenarioFile sf;

        const json g = require_field<json>(j, "geometry");
        const int K = get_field<int>(g, "K", 8);
        const int N = get_field<int>(g, "N", 16);
        sf.geometry = make_grid_geometry(
            K, N, get_field<double>(g, "carrier_freq", 5.22e9),
            get_field<double>(g, "element_spacing", 0.5),
            get_field<double>(g, "tx_range", 1.0));
        sf.geometry.comm_antennas = get_field<int>(g, "M_comm", 3);
        sf.geometry.sense_antennas = get_field<int>(g, "M_sense", 3);
        sf.geometry.theta_comm_aod =
            get_field<double>(g, "theta_comm_aod", -20.0 * M_PI / 180.0);
        sf.geometry.theta_sense_aod =
            get_field<double>(g, "theta_sense_aod", 50.0 * M_PI / 180.0);
        sf.geometry.theta_comm_aoa =
            get_field<double>(g, "theta_comm_aoa", sf.geometry.theta_comm_aod);
        sf.geometry.theta_sense_aoa =
            get_field<double>(g, "theta_sense_aoa", sf.geometry.theta_sense_aod);
        sf.geometry.tx_power = get_field<double>(g, "tx_power", 1.0);
        sf.geometry.noise_power = get_field<double>(g, "noise_power", 1e-10);
        if (g.contains("tx_position"))
        {
            const auto p = g.at("tx_position").get<std::vector<double>>();
            if (p.size() != 3)
                throw std::invalid_argument("field 'tx_position' must have 3 coordinates");
            sf.geometry.tx_position = arma::vec(p);
        }
        if (g.contains("ris_element_positions"))
        {
            const auto p = g.at("ris_element_positions").get<std::vector<double>>();
            if (p.size() != static_cast<std::size_t>(3) * K * N)
                throw std::invalid_argument(
                    "field 'ris_element_positions' must hold 3*K*N coordinates");
            sf.geometry.element_positions =
                arma::reshape(arma::vec(p), 3, static_cast<arma::uword>(K) * N);
        }
        if (g.contains("pathloss_comm"))
            sf.geometry.pathloss_comm =
                arma::vec(g.at("pathloss_comm").get<std::vector<double>>());
        if (g.contains("pathloss_sense"))
            sf.geometry.pathloss_sense =
                arma::vec(g.at("pathloss_sense").get<std::vector<double>>());
        sf.geometry.validate();

        if (j.contains("optimizer"))
        {
            const json o = j.at("optimizer");
            sf.optimizer.omega1 = get_field<double>(o, "omega1", 1.0);
            sf.optimizer.omega2 = get_field<double>(o, "omega2", 1.0);
            sf.optimizer.omega3 = get_field<double>(o, "omega3", 0.0);
            sf.optimizer.tolerance = get_field<double>(o, "tolerance", 1e-4);
            sf.optimizer.max_iterations = get_field<int>(o, "max_iterations", 100);
            sf.optimizer.rng_seed = get_field<std::uint64_t>(o, "rng_seed", 1);
            sf.optimizer.onebit = get_field<bool>(o, "onebit", false);
            sf.optimizer.penalty_init = get_field<double>(o, "penalty_init", 0.0);
            sf.optimizer.penalty_growth = get_field<double>(o, "penalty_growth", 5.0);
            sf.optimizer.penalty_rounds = get_field<int>(o, "penalty_rounds", 6);
            sf.optimizer.validate();
        }

        if (j.contains("key"))
        {
            sf.key = key_from_json(j.at("key"));
            sf.has_key = true;
        }

        sf.scenario.geometry = sf.geometry;
        if (j.contains("simulation"))
        {
            const json s = j.at("simulation");
            sf.scenario.duration = get_field<double>(s, "duration", 10.0);
            sf.scenario.packet_rate = get_field<double>(s, "packet_rate", 500.0);
            sf.scenario.packet_duration = get_field<double>(s, "packet_duration", 5e-4);
            sf.scenario.snr_db = get_field<double>(s, "snr_db", 20.0);
            sf.scenario.sense_amplitude = get_field<double>(s, "sense_amplitude", 1.0);
            sf.scenario.static_path_scale = get_field<double>(s, "static_path_scale", 2.0);
            sf.scenario.rx_clock_offset = get_field<double>(s, "rx_clock_offset", 0.0);
            sf.scenario.rx_clock_drift = get_field<double>(s, "rx_clock_drift", 0.0);
            sf.scenario.subcarriers = get_field<int>(s, "subcarriers", 30);
            sf.scenario.bandwidth = get_field<double>(s, "bandwidth", 20e6);
            sf.scenario.nominal_range = get_field<double>(s, "nominal_range", 3.0);
            sf.scenario.rng_seed = get_field<std::uint64_t>(s, "rng_seed", 1);
            if (s.contains("attacker_aoa"))
                sf.scenario.attacker_aoa = s.at("attacker_aoa").get<double>();
            sf.key_n_configs = get_field<int>(s, "n_configs", 4);

            if (s.contains("target_motion"))
            {
                const json m = s.at("target_motion");
                const std::string kind = get_field<std::string>(m, "kind", "sinusoid");
                if (kind == "sinusoid")
                {
                    sf.scenario.motion.kind = TargetMotion::Kind::sinusoid;
                    sf.scenario.motion.amplitude_m = get_field<double>(m, "amplitude", 0.005);
                    sf.scenario.motion.freq_hz = get_field<double>(m, "frequency", 0.25);
                }
                else if (kind == "gesture")
                {
                    sf.scenario.motion.kind = TargetMotion::Kind::gesture;
                    for (const auto &pt :
                         require_field<json>(m, "velocity_profile"))
                    {
                        if (!pt.is_array() || pt.size() != 2)
                            throw std::invalid_argument(
                                "field 'velocity_profile' must hold [time, velocity] pairs");
                        sf.scenario.motion.velocity_profile.emplace_back(
                            pt[0].get<double>(), pt[1].get<double>());
                    }
                }
                else
                {
                    throw std::invalid_argument("field 'target_motion.kind' unknown: " + kind);
                }
            }
        }
        return sf;
    }

    void save_optimizer_result(const OptimizerResult &result, const std::string &path)
    {
        json j;
        j["varphi"] = result.varphi;
        j["converged"] = result.converged;
        j["iterations"] = result.iterations;
        j["objective_trace"] = result.objective_trace;
        json pairs = json::array();
        for (const auto &p : result.pairs)
        {
            json e;
            e["phi1"] = cx_vec_to_json(p.phi1);
            e["phi2"] = cx_vec_to_json(p.phi2);
            pairs.push_back(e);
        }
        j["pairs"] = pairs;
        write_text(path, j.dump(2) + "\n");
    }

    OptimizerResult load_optimizer_result(const std::string &path)
    {
        const json j = load_json(path);
        OptimizerResult res;
        res.varphi = require_field<double>(j, "varphi");
        res.converged = get_field<bool>(j, "converged", false);
        res.iterations = get_field<int>(j, "iterations", 0);
        res.objective_trace =
            get_field<std::vector<double>>(j, "objective_trace", {});
        for (const auto &e : require_field<json>(j, "pairs"))
        {
            BeamVectorPair p;
            p.phi1 = cx_vec_from_json(require_field<json>(e, "phi1"), "phi1");
            p.phi2 = cx_vec_from_json(require_field<json>(e, "phi2"), "phi2");
            if (p.phi1.n_elem != p.phi2.n_elem)
                throw std::invalid_argument("field 'pairs' has mismatched vector lengths");
            res.pairs.push_back(std::move(p));
        }
        return res;
    }

    void save_key(const MaskingKey &key, const std::string &path)
    {
        write_text(path, key_to_json(key).dump(2) + "\n");
    }

    MaskingKey load_key(const std::string &path)
    {
        return key_from_json(load_json(path));
    }

    void save_schedule(const MaskingSchedule &schedule, const std::string &path)
    {
        std::ostringstream out;
        for (const auto &s : schedule.slots)
            out << static_cast<std::int64_t>(std::llround(s.start_time * 1e9)) << ','
                << s.config_index << ',' << (s.is_sync ? 1 : 0) << '\n';
        write_text(path, out.str());
    }

    void save_trace(const CsiTrace &trace, const std::string &path)
    {
        std::ostringstream out;
        out << std::setprecision(17);
        for (const auto &s : trace.samples)
        {
            const auto ns = static_cast<std::int64_t>(std::llround(s.timestamp * 1e9));
            for (arma::uword a = 0; a < s.csi.n_rows; ++a)
                for (arma::uword f = 0; f < s.csi.n_cols; ++f)
                    out << ns << ',' << a << ',' << f << ',' << s.csi(a, f).real() << ','
                        << s.csi(a, f).imag() << '\n';
        }
        write_text(path, out.str());
    }

    CsiTrace load_trace(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("cannot open file: " + path);

        struct Rec
        {
            std::int64_t ns;
            int a, f;
            double re, im;
        };
        std::vector<Rec> recs;
        std::string line;
        int max_a = -1, max_f = -1;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.empty())
                continue;
            Rec r;
            char c1, c2, c3, c4;
            std::istringstream ls(line);
            if (!(ls >> r.ns >> c1 >> r.a >> c2 >> r.f >> c3 >> r.re >> c4 >> r.im) ||
                c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
                throw std::invalid_argument("malformed trace record at line " +
                                            std::to_string(lineno) + " of " + path);
            max_a = std::max(max_a, r.a);
            max_f = std::max(max_f, r.f);
            recs.push_back(r);
        }
        CsiTrace trace;
        if (recs.empty())
            return trace;

        CsiSample cur;
        cur.timestamp = static_cast<double>(recs[0].ns) * 1e-9;
        cur.csi.zeros(max_a + 1, max_f + 1);
        std::int64_t cur_ns = recs[0].ns;
        for (const auto &r : recs)
        {
            if (r.ns != cur_ns)
            {
                trace.samples.push_back(cur);
                cur_ns = r.ns;
                cur.timestamp = static_cast<double>(r.ns) * 1e-9;
                cur.csi.zeros(max_a + 1, max_f + 1);
            }
            cur.csi(r.a, r.f) = std::complex<double>(r.re, r.im);
        }
        trace.samples.push_back(cur);
        trace.validate();
        return trace;
    }

    void save_merged_series(const MergedSeries &series, const std::string &path)
    {
        CsiTrace trace;
        trace.samples.reserve(series.t.size());
        for (std::size_t i = 0; i < series.t.size(); ++i)
            trace.samples.push_back({series.t[i], series.v[i]});
        save_trace(trace, path);
    }

    void save_objective_trace_csv(const std::vector<double> &trace,
                                  const std::string &path)
    {
        std::ostringstream out;
        out << std::setprecision(17) << "iteration,objective\n";
        for (std::size_t i = 0; i < trace.size(); ++i)
            out << (i + 1) << ',' << trace[i] << '\n';
        write_text(path, out.str());
    }

    void save_beampattern_csv(const std::vector<BeampatternPoint> &points,
                              const std::string &path)
    {
        std::ostringstream out;
        out << std::setprecision(12) << "angle_deg,mag1,mag2,phase_diff_rad\n";
        for (const auto &p : points)
            out << p.angle_rad * 180.0 / M_PI << ',' << p.mag1 << ',' << p.mag2 << ','
                << p.phase_diff_rad << '\n';
        write_text(path, out.str());
    }

    void save_snr_series_csv(const std::vector<double> &times,
                             const std::vector<double> &snr_db,
                             const std::string &path)
    {
        std::ostringstream out;
        out << std::setprecision(12) << "time_s,comm_snr_db\n";
        for (std::size_t i = 0; i < times.size() && i < snr_db.size(); ++i)
            out << times[i] << ',' << snr_db[i] << '\n';
        write_text(path, out.str());
    }

    namespace
    {
        json diagnostics_to_json(const DemaskDiagnostics &diag)
        {
            json j;
            j["sync_offset_s"] = diag.sync.offset;
            j["sync_drift"] = diag.sync.drift;
            j["sync_residual_s"] = diag.sync.residual;
            j["sync_low_confidence"] = diag.sync.low_confidence;
            j["sync_window_minima"] = diag.sync.window_minima;
            j["dropped_ratio_samples"] = diag.dropped_ratio_samples;
            j["dropped_guard"] = diag.dropped_guard;
            j["dropped_outside"] = diag.dropped_outside;
            j["sync_excluded"] = diag.sync_excluded;
            j["gain_residual_mean"] = diag.gain_residual_mean;
            j["gain_residual_max"] = diag.gain_residual_max;
            json counts = json::array();
            for (arma::uword a = 0; a < diag.pair_counts.n_rows; ++a)
            {
                json row = json::array();
                for (arma::uword b = 0; b < diag.pair_counts.n_cols; ++b)
                    row.push_back(diag.pair_counts(a, b));
                counts.push_back(row);
            }
            j["pair_counts"] = counts;
            j["warnings"] = diag.warnings;
            return j;
        }
    } // namespace

    void save_run_report(const RunReport &report, const std::string &path)
    {
        json j;
        j["legit_correlation"] = report.legit_correlation;
        j["attacker_correlation"] = report.attacker_correlation;
        j["attacker_raw_correlation"] = report.attacker_raw_correlation;
        j["legit_peak_hz"] = report.legit_peak_hz;
        j["legit_peak_prominence"] = report.legit_peak_prominence;
        j["attacker_peak_hz"] = report.attacker_peak_hz;
        j["attacker_peak_prominence"] = report.attacker_peak_prominence;
        j["snr_spread_db"] = report.snr_spread_db;
        j["realized_snr_db"] = report.realized_snr_db;
        j["legit_diagnostics"] = diagnostics_to_json(report.legit_diagnostics);
        write_text(path, j.dump(2) + "\n");
    }

    void save_diagnostics(const DemaskDiagnostics &diag, const std::string &path)
    {
        write_text(path, diagnostics_to_json(diag).dump(2) + "\n");
    }

    void save_manifest(const std::vector<std::pair<std::string, std::string>> &entries,
                       const std::string &path)
    {
        json j;
        for (const auto &[k, v] : entries)
            j[k] = v;
        write_text(path, j.dump(2) + "\n");
    }

} // namespace rismask
