// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_sim_H
#define rismask_sim_H

#include <cstdint>
#include <string>
#include <vector>

#include "rismask/beamform.hpp"
#include "rismask/demask.hpp"
#include "rismask/scheduler.hpp"

namespace rismask
{

    // Displacement of the sensing target over time. Sinusoid: periodic chest
    // or limb motion of the given depth. Gesture: piecewise-linear radial
    // velocity profile (time, velocity), integrated to displacement.
    struct TargetMotion
    {
        enum class Kind
        {
            sinusoid,
            gesture
        };
        Kind kind = Kind::sinusoid;
        double amplitude_m = 0.005;
        double freq_hz = 0.25;
        std::vector<std::pair<double, double>> velocity_profile;

        double displacement(double t) const;
    };

    struct Scenario
    {
        ScenarioGeometry geometry;
        MaskingKey key;
        std::vector<BeamVectorPair> pairs;
        TargetMotion motion;

        double duration = 10.0;         // seconds, >= 2 * t_sync
        double packet_rate = 500.0;     // Hz
        double packet_duration = 5e-4;  // seconds
        double snr_db = 20.0;           // per-receiver noise level
        double sense_amplitude = 1.0;   // shared dynamic-path amplitude a^S
        double static_path_scale = 2.0; // static paths relative to dynamic RMS
        double rx_clock_offset = 0.0;   // receiver timestamp offset, seconds
        double rx_clock_drift = 0.0;    // receiver clock drift (fraction)
        double attacker_aoa = NAN;      // NaN: colocated with the sensing Rx
        int subcarriers = 30;
        double bandwidth = 20e6;      // Hz, span of the subcarrier comb
        double nominal_range = 3.0;   // meters, RIS to sensing Rx
        std::uint64_t rng_seed = 1;

        void validate() const;
    };

    struct RunReport
    {
        double legit_correlation = 0.0;
        double attacker_correlation = 0.0;     // wrong-key demasking
        double attacker_raw_correlation = 0.0; // no demasking at all
        double legit_peak_hz = 0.0;
        double legit_peak_prominence = 0.0;
        double attacker_peak_hz = 0.0;
        double attacker_peak_prominence = 0.0;
        std::vector<double> snr_series_db; // per-packet comm SNR
        double snr_spread_db = 0.0;        // max - min over candidate configs
        double realized_snr_db = 0.0;      // measured sensing-trace SNR
        DemaskDiagnostics legit_diagnostics;
    };

    // Instantaneous complex dynamic-path gain per row: shared amplitude,
    // per-row static phase, and the two-way path-length phase modulation of
    // the target displacement.
    arma::cx_vec synthesize_dynamic_gain(const TargetMotion &motion,
                                         const arma::vec &row_phase,
                                         double sense_amplitude, double wavelength,
                                         double t);

    struct SimOutput
    {
        CsiTrace legit;
        CsiTrace attacker;
        std::vector<double> truth_t; // true packet times
        arma::cx_vec truth;          // zero-mean dynamic component per packet
        MaskingSchedule schedule;
        std::vector<double> packet_times;
        std::vector<int> packet_configs; // -1 for sync slots
        std::vector<double> snr_series_db;
        double realized_snr_db = 0.0;
        std::vector<double> sync_truth_ends; // receiver-time end of each sync run
    };

    // Full masked-physics synthesis: schedule, packet-triggered switching,
    // per-packet per-subcarrier CSI with seeded noise, ground truth, and the
    // per-packet comm SNR series.
    SimOutput run_scenario(const Scenario &scenario);

    // Demasks the legitimate trace with the true key and the attacker trace
    // with a random wrong key (plus no demasking at all), then scores every
    // recovered sequence against the ground truth.
    RunReport evaluate(const SimOutput &sim, const Scenario &scenario,
                       const DemaskParams &params);

    // |<x, y>| / (|x| |y|) between a recovered stream and the ground truth on
    // the overlapping timestamp grid; the reported value is the median over
    // (antenna, subcarrier) streams.
    double truth_correlation(const MergedSeries &recovered,
                             const std::vector<double> &truth_t,
                             const arma::cx_vec &truth, double match_tolerance);

    // Dominant spectral peak of the stream-averaged periodogram below fmax.
    struct SpectralPeak
    {
        double freq_hz = 0.0;
        double prominence = 0.0; // peak magnitude over the median magnitude
    };
    SpectralPeak dominant_peak(const MergedSeries &series, double fmax_hz);

} // namespace rismask

#endif
