// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rismask/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rismask/rng.hpp"

namespace rismask
{

    namespace
    {
        using cxd = std::complex<double>;
    }

    double TargetMotion::displacement(double t) const
    {
        if (kind == Kind::sinusoid)
            return amplitude_m * std::sin(2.0 * M_PI * freq_hz * t);

        // Piecewise-linear velocity integrated up to t.
        if (velocity_profile.empty() || t <= velocity_profile.front().first)
            return 0.0;
        double disp = 0.0;
        for (std::size_t i = 0; i + 1 < velocity_profile.size(); ++i)
        {
            const auto [t0, v0] = velocity_profile[i];
            const auto [t1, v1] = velocity_profile[i + 1];
            if (t <= t0)
                break;
            const double hi = std::min(t, t1);
            if (hi > t0)
            {
                const double w = t1 > t0 ? (hi - t0) / (t1 - t0) : 0.0;
                const double v_hi = v0 + (v1 - v0) * w;
                disp += 0.5 * (v0 + v_hi) * (hi - t0);
            }
        }
        if (t > velocity_profile.back().first)
            disp += velocity_profile.back().second * (t - velocity_profile.back().first);
        return disp;
    }

    void Scenario::validate() const
    {
        geometry.validate();
        key.validate();
        if (key.row_count() != geometry.row_count)
            throw std::invalid_argument("Scenario: key row count must match geometry");
        if (pairs.size() != static_cast<std::size_t>(geometry.row_count))
            throw std::invalid_argument("Scenario: one beam pair per RIS row required");
        for (const auto &p : pairs)
            if (p.phi1.n_elem != static_cast<arma::uword>(geometry.elements_per_row) ||
                p.phi2.n_elem != static_cast<arma::uword>(geometry.elements_per_row))
                throw std::invalid_argument("Scenario: beam vector length must match geometry");
        if (duration < 2.0 * key.t_sync)
            throw std::invalid_argument("Scenario: duration must cover at least 2 * t_sync");
        if (packet_rate <= 0.0 || packet_duration <= 0.0)
            throw std::invalid_argument("Scenario: packet rate and duration must be > 0");
        if (packet_rate * packet_duration >= 1.0)
            throw std::invalid_argument("Scenario: packet_rate * packet_duration must be < 1");
        if (packet_duration > 0.8 / packet_rate)
            throw std::invalid_argument("Scenario: packets too long for the jittered spacing");
        if (subcarriers < 1)
            throw std::invalid_argument("Scenario: need at least one subcarrier");
    }

    arma::cx_vec synthesize_dynamic_gain(const TargetMotion &motion,
                                         const arma::vec &row_phase,
                                         double sense_amplitude, double wavelength,
                                         double t)
    {
        const double phase = -4.0 * M_PI * motion.displacement(t) / wavelength;
        arma::cx_vec g(row_phase.n_elem);
        for (arma::uword k = 0; k < row_phase.n_elem; ++k)
            g(k) = std::polar(sense_amplitude, row_phase(k) + phase);
        return g;
    }

    SimOutput run_scenario(const Scenario &sc)
    {
        sc.validate();
        const int K = sc.geometry.row_count;
        const int N = sc.geometry.elements_per_row;
        const int M = sc.geometry.sense_antennas;
        const int F = sc.subcarriers;
        const double lambda = sc.geometry.wavelength();
        const int n_cfg = sc.key.n_configs();

        SimOutput out;
        const arma::cx_mat h_tx = tx_ris_channel(sc.geometry);
        const RowChannels rows = effective_channels(sc.geometry, h_tx);
        out.schedule = build_schedule(sc.key, sc.duration);

        // Jittered packet starts: nominal spacing with +-10% seeded jitter.
        Rng pkt_rng(Rng::derive_seed(sc.rng_seed, 0x70));
        const double interval = 1.0 / sc.packet_rate;
        double t = interval * pkt_rng.uniform();
        while (t + sc.packet_duration < sc.duration)
        {
            out.packet_times.push_back(t);
            t += interval * (1.0 + 0.2 * (pkt_rng.uniform() - 0.5));
        }
        out.packet_configs = packet_triggered_timeline(out.schedule, out.packet_times,
                                                       {sc.packet_duration});

        // Per-row static phase of the target path and per-row delay.
        Rng phase_rng(Rng::derive_seed(sc.rng_seed, 0x71));
        arma::vec row_phase(K);
        for (auto &v : row_phase)
            v = phase_rng.uniform(0.0, 2.0 * M_PI);
        arma::vec row_delay(K);
        for (int k = 0; k < K; ++k)
        {
            arma::vec center(3, arma::fill::zeros);
            for (int n = 0; n < N; ++n)
                center += sc.geometry.element_position(k, n);
            center /= N;
            row_delay(k) =
                (arma::norm(center - sc.geometry.tx_position) + sc.nominal_range) /
                c_speed_of_light;
        }

        // Config resolution: candidate indices 0..n_cfg-1, sync run at n_cfg.
        std::vector<arma::cx_mat> config_phis(n_cfg + 1);
        for (int n = 0; n < n_cfg; ++n)
            config_phis[n] = select_phis(sc.pairs, sc.key.candidates[n].selection);
        config_phis[n_cfg] = select_phis(sc.pairs, sc.key.sync_config.selection);

        // Per-configuration, per-subcarrier responses via the channel model:
        // dynamic coefficient A (unit target modulation) and static term S.
        const arma::cx_cube zero_static(M, N, K, arma::fill::zeros);
        const arma::cx_vec zero_dyn(K, arma::fill::zeros);
        std::vector<double> df(F);
        for (int f = 0; f < F; ++f)
            df[f] = (f - (F - 1) / 2.0) * (sc.bandwidth / F);

        Rng static_rng(Rng::derive_seed(sc.rng_seed, 0x72));
        arma::cx_mat A_resp(M, (n_cfg + 1) * F);
        arma::cx_mat S_resp(M, (n_cfg + 1) * F);
        std::vector<arma::cx_cube> static_cubes(F);
        for (int f = 0; f < F; ++f)
        {
            static_cubes[f].set_size(M, N, K);
            for (auto &v : static_cubes[f])
                v = static_rng.cnormal();
        }
        for (int n = 0; n <= n_cfg; ++n)
            for (int f = 0; f < F; ++f)
            {
                // Unit target amplitude here; the scenario amplitude scales
                // the whole column so the static paths can be referenced to
                // the unit response even when the target return is zero.
                arma::cx_vec dyn(K);
                for (int k = 0; k < K; ++k)
                    dyn(k) = std::polar(1.0, row_phase(k)) *
                             std::polar(1.0, -2.0 * M_PI * df[f] * row_delay(k));
                A_resp.col(n * F + f) =
                    aggregate_sensing_csi(sc.geometry, h_tx, config_phis[n], dyn, zero_static);
                S_resp.col(n * F + f) = aggregate_sensing_csi(sc.geometry, h_tx, config_phis[n],
                                                              zero_dyn, static_cubes[f]);
            }

        // Static paths scaled against the unit-amplitude dynamic RMS.
        const double rms_unit = std::sqrt(arma::accu(arma::square(arma::abs(A_resp))) /
                                          A_resp.n_elem);
        const double rms_stat = std::sqrt(arma::accu(arma::square(arma::abs(S_resp))) /
                                          S_resp.n_elem);
        if (rms_stat > 0.0)
            S_resp *= sc.static_path_scale * rms_unit / rms_stat;
        A_resp *= sc.sense_amplitude;

        // Attacker response set: same physics when colocated, otherwise its
        // own arrival angle and static environment.
        arma::cx_mat A_att = A_resp;
        arma::cx_mat S_att = S_resp;
        if (std::isfinite(sc.attacker_aoa))
        {
            ScenarioGeometry ag = sc.geometry;
            ag.theta_sense_aoa = sc.attacker_aoa;
            Rng att_rng(Rng::derive_seed(sc.rng_seed, 0x73));
            for (int n = 0; n <= n_cfg; ++n)
                for (int f = 0; f < F; ++f)
                {
                    arma::cx_vec dyn(K);
                    for (int k = 0; k < K; ++k)
                        dyn(k) = std::polar(1.0, row_phase(k)) *
                                 std::polar(1.0, -2.0 * M_PI * df[f] * row_delay(k));
                    arma::cx_cube cube(M, N, K);
                    for (auto &v : cube)
                        v = att_rng.cnormal();
                    A_att.col(n * F + f) =
                        aggregate_sensing_csi(ag, h_tx, config_phis[n], dyn, zero_static);
                    S_att.col(n * F + f) =
                        aggregate_sensing_csi(ag, h_tx, config_phis[n], zero_dyn, cube);
                }
            const double rms_att = std::sqrt(arma::accu(arma::square(arma::abs(S_att))) /
                                             S_att.n_elem);
            if (rms_att > 0.0)
                S_att *= sc.static_path_scale * rms_unit / rms_att;
            A_att *= sc.sense_amplitude;
        }

        // Noiseless synthesis first; the noise floor is calibrated against
        // the realized mean signal power.
        const std::size_t P = out.packet_times.size();
        std::vector<arma::cx_mat> clean_legit(P), clean_att(P);
        arma::cx_vec modulation(P);
        for (std::size_t p = 0; p < P; ++p)
        {
            const double tp = out.packet_times[p];
            const double phase = -4.0 * M_PI * sc.motion.displacement(tp) / lambda;
            const cxd m = std::polar(1.0, phase);
            modulation(p) = m;
            const int cfg = out.packet_configs[p] < 0 ? n_cfg : out.packet_configs[p];

            arma::cx_mat yl(M, F), ya(M, F);
            for (int f = 0; f < F; ++f)
            {
                yl.col(f) = m * A_resp.col(cfg * F + f) + S_resp.col(cfg * F + f);
                ya.col(f) = m * A_att.col(cfg * F + f) + S_att.col(cfg * F + f);
            }
            clean_legit[p] = std::move(yl);
            clean_att[p] = std::move(ya);
        }

        double sig_power = 0.0;
        for (const auto &ymat : clean_legit)
            sig_power += arma::accu(arma::square(arma::abs(ymat)));
        sig_power /= std::max<std::size_t>(1, P) * M * F;
        const double noise_var = sig_power * std::pow(10.0, -sc.snr_db / 10.0);
        const double noise_sd = std::sqrt(noise_var);

        Rng noise_legit(Rng::derive_seed(sc.rng_seed, 0x74));
        Rng noise_att(Rng::derive_seed(sc.rng_seed, 0x75));
        double noise_power = 0.0;
        out.legit.samples.reserve(P);
        out.attacker.samples.reserve(P);
        for (std::size_t p = 0; p < P; ++p)
        {
            const double tp = out.packet_times[p];
            CsiSample sl, sa;
            sl.timestamp = (1.0 + sc.rx_clock_drift) * tp + sc.rx_clock_offset;
            sa.timestamp = tp;
            sl.csi = clean_legit[p];
            sa.csi = clean_att[p];
            for (auto &v : sl.csi)
            {
                const cxd nz = noise_sd * noise_legit.cnormal();
                noise_power += std::norm(nz);
                v += nz;
            }
            for (auto &v : sa.csi)
                v += noise_sd * noise_att.cnormal();
            out.legit.samples.push_back(std::move(sl));
            out.attacker.samples.push_back(std::move(sa));
        }
        noise_power /= std::max<std::size_t>(1, P) * M * F;
        out.realized_snr_db = noise_power > 0.0
                                  ? 10.0 * std::log10(sig_power / noise_power)
                                  : arma::datum::inf;

        // Ground truth: the zero-mean dynamic modulation at the packet times.
        out.truth_t = out.packet_times;
        out.truth = modulation -
                    arma::accu(modulation) / static_cast<double>(std::max<std::size_t>(1, P));

        // Per-packet comm SNR series.
        out.snr_series_db.reserve(P);
        for (std::size_t p = 0; p < P; ++p)
        {
            const int cfg = out.packet_configs[p] < 0 ? n_cfg : out.packet_configs[p];
            const double snr = comm_snr(rows, config_phis[cfg], sc.geometry.tx_power,
                                        sc.geometry.noise_power, sc.geometry.comm_antennas);
            out.snr_series_db.push_back(10.0 * std::log10(std::max(snr, 1e-300)));
        }

        // Receiver-time sync run ends, for sync-detection scoring.
        for (std::size_t i = 0; i < out.schedule.slots.size(); ++i)
        {
            if (!out.schedule.slots[i].is_sync)
                continue;
            std::size_t j = i;
            while (j + 1 < out.schedule.slots.size() && out.schedule.slots[j + 1].is_sync)
                ++j;
            const double end = out.schedule.slots[j].start_time + sc.key.t_ris;
            out.sync_truth_ends.push_back((1.0 + sc.rx_clock_drift) * end +
                                          sc.rx_clock_offset);
            i = j;
        }
        return out;
    }

    double truth_correlation(const MergedSeries &recovered,
                             const std::vector<double> &truth_t,
                             const arma::cx_vec &truth, double match_tolerance)
    {
        if (recovered.t.empty() || truth_t.empty())
            return 0.0;
        const int A = static_cast<int>(recovered.v[0].n_rows);
        const int F = static_cast<int>(recovered.v[0].n_cols);

        // Nearest-timestamp matching within the tolerance.
        std::vector<std::ptrdiff_t> match(recovered.t.size(), -1);
        std::size_t j = 0;
        for (std::size_t i = 0; i < recovered.t.size(); ++i)
        {
            while (j + 1 < truth_t.size() &&
                   std::abs(truth_t[j + 1] - recovered.t[i]) <=
                       std::abs(truth_t[j] - recovered.t[i]))
                ++j;
            if (std::abs(truth_t[j] - recovered.t[i]) <= match_tolerance)
                match[i] = static_cast<std::ptrdiff_t>(j);
        }

        std::vector<double> corrs;
        for (int a = 0; a < A; ++a)
            for (int f = 0; f < F; ++f)
            {
                cxd dot = 0.0;
                double pr = 0.0, pt = 0.0;
                for (std::size_t i = 0; i < recovered.t.size(); ++i)
                {
                    if (match[i] < 0)
                        continue;
                    const cxd r = recovered.v[i](a, f);
                    const cxd g = truth(match[i]);
                    dot += r * std::conj(g);
                    pr += std::norm(r);
                    pt += std::norm(g);
                }
                if (pr > 0.0 && pt > 0.0)
                    corrs.push_back(std::abs(dot) / std::sqrt(pr * pt));
                else
                    corrs.push_back(0.0);
            }
        if (corrs.empty())
            return 0.0;
        std::sort(corrs.begin(), corrs.end());
        return corrs[corrs.size() / 2];
    }

    SpectralPeak dominant_peak(const MergedSeries &series, double fmax_hz)
    {
        SpectralPeak peak;
        const std::size_t n = series.t.size();
        if (n < 8)
            return peak;
        const double span = series.t.back() - series.t.front();
        if (span <= 0.0)
            return peak;
        const double rate = static_cast<double>(n - 1) / span;
        const double dt = 1.0 / rate;

        const int A = static_cast<int>(series.v[0].n_rows);
        const int F = static_cast<int>(series.v[0].n_cols);

        // 4x zero-padded length for a finer frequency grid.
        std::size_t nfft = 1;
        while (nfft < 4 * n)
            nfft <<= 1;

        arma::vec power(nfft, arma::fill::zeros);
        arma::cx_vec x(nfft);
        for (int a = 0; a < A; ++a)
            for (int f = 0; f < F; ++f)
            {
                x.zeros();
                cxd mean = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    mean += series.v[i](a, f);
                mean /= static_cast<double>(n);

                // Linear interpolation onto the mean-rate grid.
                std::size_t k = 0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    const double t = series.t.front() + i * dt;
                    while (k + 1 < n && series.t[k + 1] < t)
                        ++k;
                    cxd v;
                    if (k + 1 >= n)
                        v = series.v[n - 1](a, f);
                    else
                    {
                        const double t0 = series.t[k];
                        const double t1 = series.t[k + 1];
                        const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
                        v = (1.0 - w) * series.v[k](a, f) + w * series.v[k + 1](a, f);
                    }
                    x(i) = v - mean;
                }
                power += arma::square(arma::abs(arma::fft(x)));
            }

        const double df = rate / static_cast<double>(nfft);
        const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(0.02 / df)));
        const auto hi = std::min<std::size_t>(nfft / 2,
                                              static_cast<std::size_t>(fmax_hz / df));
        if (hi <= lo)
            return peak;

        std::size_t best = lo;
        for (std::size_t i = lo; i < hi; ++i)
            if (power(i) > power(best))
                best = i;

        // Parabolic refinement on the log power around the peak bin.
        double delta = 0.0;
        if (best > lo && best + 1 < hi && power(best) > 0.0)
        {
            const double l = std::log(std::max(power(best - 1), 1e-300));
            const double c = std::log(std::max(power(best), 1e-300));
            const double r = std::log(std::max(power(best + 1), 1e-300));
            const double denom = l - 2.0 * c + r;
            if (std::abs(denom) > 1e-12)
                delta = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
        }
        peak.freq_hz = (static_cast<double>(best) + delta) * df;

        arma::vec band = power.subvec(lo, hi - 1);
        const arma::vec sorted = arma::sort(band);
        const double median = sorted(sorted.n_elem / 2);
        peak.prominence = median > 0.0 ? power(best) / median : 0.0;
        return peak;
    }

    RunReport evaluate(const SimOutput &sim, const Scenario &sc, const DemaskParams &params)
    {
        RunReport report;
        report.snr_series_db = sim.snr_series_db;
        report.realized_snr_db = sim.realized_snr_db;

        const double tol = 0.4 / sc.packet_rate;
        const double fmax = std::max(1.0, 4.0 * sc.motion.freq_hz);

        const DemaskOutput legit = demask_pipeline(sim.legit, sc.key, params);
        report.legit_diagnostics = legit.diagnostics;
        report.legit_correlation =
            truth_correlation(legit.cleaned, sim.truth_t, sim.truth, tol);
        const SpectralPeak lp = dominant_peak(legit.cleaned, fmax);
        report.legit_peak_hz = lp.freq_hz;
        report.legit_peak_prominence = lp.prominence;

        // Attacker with a uniformly random wrong key of the same shape.
        const MaskingKey wrong = make_key(sc.geometry.row_count, sc.key.n_configs(),
                                          Rng::derive_seed(sc.rng_seed, 0xa77acc),
                                          sc.key.t_ris, sc.key.t_sync, sc.key.sync_len);
        try
        {
            const DemaskOutput att = demask_pipeline(sim.attacker, wrong, params);
            report.attacker_correlation =
                truth_correlation(att.cleaned, sim.truth_t, sim.truth, tol);
        }
        catch (const std::exception &)
        {
            report.attacker_correlation = 0.0;
        }

        // Attacker on the raw masked trace: static removal only.
        MergedSeries raw;
        raw.t.reserve(sim.attacker.samples.size());
        raw.v.reserve(sim.attacker.samples.size());
        arma::cx_mat mean;
        if (!sim.attacker.samples.empty())
        {
            mean.zeros(sim.attacker.samples[0].csi.n_rows,
                       sim.attacker.samples[0].csi.n_cols);
            for (const auto &s : sim.attacker.samples)
                mean += s.csi;
            mean /= static_cast<double>(sim.attacker.samples.size());
            for (const auto &s : sim.attacker.samples)
            {
                raw.t.push_back(s.timestamp);
                raw.v.push_back(s.csi - mean);
            }
        }
        report.attacker_raw_correlation =
            truth_correlation(raw, sim.truth_t, sim.truth, tol);
        const SpectralPeak ap = dominant_peak(raw, fmax);
        report.attacker_peak_hz = ap.freq_hz;
        report.attacker_peak_prominence = ap.prominence;

        // Comm SNR spread over the candidate configurations.
        const RowChannels rows =
            effective_channels(sc.geometry, tx_ris_channel(sc.geometry));
        double lo = arma::datum::inf, hi = 0.0;
        for (const auto &cand : sc.key.candidates)
        {
            const double snr = comm_snr(rows, select_phis(sc.pairs, cand.selection),
                                        sc.geometry.tx_power, sc.geometry.noise_power,
                                        sc.geometry.comm_antennas);
            lo = std::min(lo, snr);
            hi = std::max(hi, snr);
        }
        report.snr_spread_db = lo > 0.0 ? 10.0 * std::log10(hi / lo) : arma::datum::inf;
        return report;
    }

} // namespace rismask
