// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_demask_H
#define rismask_demask_H

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <armadillo>

#include "rismask/scheduler.hpp"

namespace rismask
{

    // One CSI measurement: complex channel estimate per antenna and subcarrier.
    struct CsiSample
    {
        double timestamp = 0.0;
        arma::cx_mat csi; // antennas x subcarriers
    };

    struct CsiTrace
    {
        std::vector<CsiSample> samples;

        int antennas() const { return samples.empty() ? 0 : static_cast<int>(samples[0].csi.n_rows); }
        int subcarriers() const { return samples.empty() ? 0 : static_cast<int>(samples[0].csi.n_cols); }
        void validate() const;
    };

    // Antenna-pair ratio streams: ant1/ant2, ant2/ant3, ant3/ant1 (or the
    // single ant1/ant2 stream with two antennas), per subcarrier.
    struct RatioSeries
    {
        std::vector<double> t;
        std::vector<arma::cx_mat> v; // streams x subcarriers per timestamp
        int dropped = 0;             // samples excluded for near-zero denominators

        int streams() const { return v.empty() ? 0 : static_cast<int>(v[0].n_rows); }
        int subcarriers() const { return v.empty() ? 0 : static_cast<int>(v[0].n_cols); }
    };

    RatioSeries csi_ratio(const CsiTrace &trace);

    // Sliding-window coefficient of variation per (stream, subcarrier):
    // SD over [t - window, t] divided by |mean|. Degenerate means are
    // reported as the large sentinel so they never mimic sync minima.
    struct CvSeries
    {
        std::vector<double> t;
        std::vector<arma::mat> cv; // streams x subcarriers per timestamp
    };

    inline constexpr double cv_sentinel = 1e6;

    CvSeries coefficient_of_variation(const RatioSeries &ratios, double window);

    struct AggregateCv
    {
        std::vector<double> t;
        std::vector<double> v;
    };

    AggregateCv aggregate_cv(const CvSeries &cv);

    // Sync-segment detection: the per-window minimum of the aggregated CV
    // marks the end of each embedded run; a linear fit against the
    // key-replayed run ends gives receiver clock offset and drift.
    struct SyncEstimate
    {
        std::vector<double> window_minima; // receiver-time argmin per full window
        double offset = 0.0;               // receiver time = (1 + drift) * schedule time + offset
        double drift = 0.0;
        double residual = 0.0; // RMS fit residual, seconds
        bool low_confidence = false;
    };

    SyncEstimate detect_sync(const AggregateCv &series, const MaskingKey &key,
                             double residual_threshold);

    // Sequences labeled by configuration, on corrected (schedule-time)
    // timestamps. Sync-slot samples are excluded from the sensing sequences.
    struct LabeledSequences
    {
        int antennas = 0;
        int subcarriers = 0;
        // seq[n] holds (corrected time, csi) for candidate configuration n.
        std::vector<std::vector<std::pair<double, arma::cx_mat>>> seq;
        int dropped_guard = 0;
        int dropped_outside = 0;
        int sync_excluded = 0;
    };

    LabeledSequences label_configs(const CsiTrace &trace, const MaskingKey &key,
                                   const SyncEstimate &clock, double guard_fraction);

    // Per-configuration temporal mean removal, in place.
    void remove_static(LabeledSequences &seqs);

    // Relative configuration gains for one (antenna, subcarrier) stream.
    // Adjacent-sample ratios inside the coherence gap populate W; the gains
    // solve min sum_{n1<n2} |g_{n1} - w_{n1,n2} g_{n2}|^2 with g[0] = 1.
    struct GainSolution
    {
        arma::cx_mat W;         // averaged relative gains, diag = 1
        arma::cx_vec g;         // g[0] = 1 exactly
        double residual = 0.0;  // objective value at the solution
        arma::umat pair_counts; // ratio observations per (n1, n2)
    };

    GainSolution estimate_relative_gains(
        const std::vector<std::vector<std::pair<double, std::complex<double>>>> &streams,
        double coherence_gap, int min_pair_count = 1);

    // Merged chronological series for all streams.
    struct MergedSeries
    {
        std::vector<double> t;
        std::vector<arma::cx_mat> v; // antennas x subcarriers
    };

    // h_n / g_n per stream, merged across configurations in time order.
    MergedSeries normalize_and_merge(const LabeledSequences &seqs,
                                     const std::vector<GainSolution> &gains_per_stream);

    // Zero-phase windowed-sinc smoothing on a uniformly resampled grid,
    // sampled back to the original timestamps. DC gain is exactly one.
    MergedSeries lowpass(const MergedSeries &series, double cutoff_hz, int taps = 63);

    struct DemaskParams
    {
        double cv_window = 0.0;      // <= 0: 2.25 * t_ris
        double coherence_gap = 5e-3; // seconds
        double guard_fraction = 0.25;
        double cutoff_hz = 10.0;
        int filter_taps = 63;
        int min_pair_count = 1;
        double sync_residual_threshold = 1.5e-3; // seconds
    };

    struct DemaskDiagnostics
    {
        SyncEstimate sync;
        int dropped_ratio_samples = 0;
        int dropped_guard = 0;
        int dropped_outside = 0;
        int sync_excluded = 0;
        double gain_residual_mean = 0.0;
        double gain_residual_max = 0.0;
        arma::umat pair_counts; // summed over streams
        std::vector<std::string> warnings;
    };

    struct DemaskOutput
    {
        MergedSeries cleaned;
        DemaskDiagnostics diagnostics;
    };

    // Full keyed pipeline: detect_sync -> label_configs -> remove_static ->
    // estimate_relative_gains -> normalize_and_merge -> lowpass. Component
    // failures are rethrown with the stage name attached.
    DemaskOutput demask_pipeline(const CsiTrace &trace, const MaskingKey &key,
                                 const DemaskParams &params);

} // namespace rismask

#endif
