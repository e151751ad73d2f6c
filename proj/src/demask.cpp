// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rismask/demask.hpp"

#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rismask
{

    namespace
    {
        using cxd = std::complex<double>;
    }

    void CsiTrace::validate() const
    {
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            if (i > 0 && samples[i].timestamp <= samples[i - 1].timestamp)
                throw std::invalid_argument("CsiTrace: timestamps must be strictly increasing");
            if (samples[i].csi.n_rows != samples[0].csi.n_rows ||
                samples[i].csi.n_cols != samples[0].csi.n_cols)
                throw std::invalid_argument("CsiTrace: inconsistent sample shapes");
        }
    }

    RatioSeries csi_ratio(const CsiTrace &trace)
    {
        trace.validate();
        const int A = trace.antennas();
        const int F = trace.subcarriers();
        if (A < 2)
            throw std::invalid_argument("csi_ratio: need at least 2 antennas");

        std::vector<std::pair<int, int>> pairs;
        if (A >= 3)
            pairs = {{0, 1}, {1, 2}, {2, 0}};
        else
            pairs = {{0, 1}};

        // Denominators are flagged against the trace-wide median magnitude.
        std::vector<double> mags;
        mags.reserve(trace.samples.size() * A * F);
        for (const auto &s : trace.samples)
            for (const cxd v : s.csi)
                mags.push_back(std::abs(v));
        double median_mag = 0.0;
        if (!mags.empty())
        {
            const std::size_t mid = mags.size() / 2;
            std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
            median_mag = mags[mid];
        }
        const double floor_mag = 1e-9 * median_mag;

        RatioSeries out;
        for (const auto &s : trace.samples)
        {
            bool ok = true;
            arma::cx_mat r(pairs.size(), F);
            for (std::size_t m = 0; m < pairs.size() && ok; ++m)
                for (int f = 0; f < F; ++f)
                {
                    const cxd den = s.csi(pairs[m].second, f);
                    if (std::abs(den) < floor_mag)
                    {
                        ok = false;
                        break;
                    }
                    r(m, f) = s.csi(pairs[m].first, f) / den;
                }
            if (!ok)
            {
                ++out.dropped;
                continue;
            }
            out.t.push_back(s.timestamp);
            out.v.push_back(std::move(r));
        }
        return out;
    }

    CvSeries coefficient_of_variation(const RatioSeries &ratios, double window)
    {
        if (window <= 0.0)
            throw std::invalid_argument("coefficient_of_variation: window must be > 0");

        const int M = ratios.streams();
        const int F = ratios.subcarriers();
        const std::size_t n = ratios.t.size();

        CvSeries out;
        std::size_t lo = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            while (ratios.t[lo] < ratios.t[i] - window)
                ++lo;
            const std::size_t count = i - lo + 1;
            if (count < 3)
                continue; // window too sparse for a meaningful deviation

            arma::mat cv(M, F);
            for (int m = 0; m < M; ++m)
                for (int f = 0; f < F; ++f)
                {
                    cxd mean = 0.0;
                    for (std::size_t j = lo; j <= i; ++j)
                        mean += ratios.v[j](m, f);
                    mean /= static_cast<double>(count);

                    double dev = 0.0;
                    for (std::size_t j = lo; j <= i; ++j)
                        dev += std::norm(ratios.v[j](m, f) - mean);
                    const double sd = std::sqrt(dev / static_cast<double>(count - 1));

                    const double mean_mag = std::abs(mean);
                    cv(m, f) = mean_mag < 1e-12 ? cv_sentinel : sd / mean_mag;
                }
            out.t.push_back(ratios.t[i]);
            out.cv.push_back(std::move(cv));
        }
        return out;
    }

    AggregateCv aggregate_cv(const CvSeries &cv)
    {
        AggregateCv out;
        out.t = cv.t;
        out.v.reserve(cv.cv.size());
        for (const auto &m : cv.cv)
            out.v.push_back(arma::accu(m));
        return out;
    }

    namespace
    {
        // End times of the maximal sync runs in a replayed schedule, indexed
        // by the t_sync window that holds them.
        std::map<std::int64_t, double> sync_run_ends(const MaskingSchedule &sched,
                                                     double t_sync)
        {
            std::map<std::int64_t, double> ends;
            const std::size_t n = sched.slots.size();
            for (std::size_t i = 0; i < n; ++i)
            {
                if (!sched.slots[i].is_sync)
                    continue;
                std::size_t j = i;
                while (j + 1 < n && sched.slots[j + 1].is_sync)
                    ++j;
                const double end = sched.slots[j].start_time + sched.t_ris;
                const std::int64_t window =
                    static_cast<std::int64_t>(sched.slots[i].start_time / t_sync);
                ends[window] = end;
                i = j;
            }
            return ends;
        }
    } // namespace

    SyncEstimate detect_sync(const AggregateCv &series, const MaskingKey &key,
                             double residual_threshold)
    {
        key.validate();
        if (series.t.size() < 2)
            throw std::runtime_error("detect_sync: empty aggregate CV series");
        const double t0 = series.t.front();
        const double t1 = series.t.back();
        if (t1 - t0 < 2.0 * key.t_sync)
            throw std::runtime_error("detect_sync: series shorter than 2 * t_sync");

        // Per-window argmin over full windows only, with the follow-up sample
        // kept for interval bracketing of the true run end. Windows whose
        // minimum does not stand clear of the window median carry no sync
        // evidence (the run happened to straddle packet phases) and are
        // skipped rather than reported as detections.
        struct WindowMin
        {
            std::int64_t window;
            double t_min;
            double t_next;
        };
        std::vector<WindowMin> mins;

        const std::int64_t m_lo = static_cast<std::int64_t>(std::ceil(t0 / key.t_sync));
        std::size_t idx = 0;
        for (std::int64_t m = m_lo;; ++m)
        {
            const double w_lo = m * key.t_sync;
            const double w_hi = (m + 1) * key.t_sync;
            if (w_hi > t1)
                break;
            while (idx < series.t.size() && series.t[idx] < w_lo)
                ++idx;
            std::size_t best = idx;
            bool any = false;
            std::size_t j = idx;
            std::vector<double> values;
            for (; j < series.t.size() && series.t[j] < w_hi; ++j)
            {
                values.push_back(series.v[j]);
                if (!any || series.v[j] < series.v[best])
                {
                    best = j;
                    any = true;
                }
            }
            if (any && values.size() >= 3)
            {
                std::nth_element(values.begin(), values.begin() + values.size() / 2,
                                 values.end());
                const double median = values[values.size() / 2];
                if (series.v[best] < 0.5 * median)
                {
                    // The dip is a plateau when the run holds more than the
                    // window's worth of packets; its right edge is the last
                    // in-run sample.
                    std::size_t edge = best;
                    while (edge + 1 < series.t.size() &&
                           series.v[edge + 1] < 0.5 * median)
                        ++edge;
                    const double next = edge + 1 < series.t.size()
                                            ? series.t[edge + 1]
                                            : series.t[edge] + key.t_ris;
                    mins.push_back({m, series.t[edge], next});
                }
            }
            idx = j;
        }
        if (mins.empty())
            throw std::runtime_error("detect_sync: no usable t_sync windows");

        const MaskingSchedule sched =
            build_schedule(key, (mins.back().window + 2) * key.t_sync);
        const auto ends = sync_run_ends(sched, key.t_sync);

        // Fit midpoint(t_min, t_next) ~= (1 + drift) * end + offset. The
        // midpoint debiases the packet-quantized argmin.
        std::vector<double> xs, ys;
        for (const auto &wm : mins)
        {
            const auto it = ends.find(wm.window);
            if (it == ends.end())
                continue;
            xs.push_back(it->second);
            ys.push_back(0.5 * (wm.t_min + wm.t_next));
        }
        if (xs.empty())
            throw std::runtime_error("detect_sync: no sync runs inside the observed windows");

        SyncEstimate est;

        auto fit = [](const std::vector<double> &x, const std::vector<double> &y,
                      double &slope, double &intercept) {
            const std::size_t n = x.size();
            if (n >= 2)
            {
                const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
                const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
                double sxx = 0.0, sxy = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    sxx += (x[i] - mx) * (x[i] - mx);
                    sxy += (x[i] - mx) * (y[i] - my);
                }
                slope = sxx > 0.0 ? sxy / sxx : 1.0;
                intercept = my - slope * mx;
            }
            else
            {
                slope = 1.0;
                intercept = y[0] - x[0];
            }
        };

        // A free slope only enters when it clearly beats the unit-slope
        // model; otherwise the drift term just feeds fit noise into the
        // offset.
        auto rms_of = [](const std::vector<double> &x, const std::vector<double> &y,
                         double slope, double intercept) {
            double ss = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                const double r = y[i] - (slope * x[i] + intercept);
                ss += r * r;
            }
            return std::sqrt(ss / static_cast<double>(x.size()));
        };
        auto select_fit = [&](const std::vector<double> &x, const std::vector<double> &y,
                              double &slope, double &intercept) {
            double s_free = 1.0, i_free = 0.0;
            fit(x, y, s_free, i_free);
            double i_fixed = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                i_fixed += y[i] - x[i];
            i_fixed /= static_cast<double>(x.size());
            if (rms_of(x, y, s_free, i_free) < 0.7 * rms_of(x, y, 1.0, i_fixed))
            {
                slope = s_free;
                intercept = i_free;
            }
            else
            {
                slope = 1.0;
                intercept = i_fixed;
            }
        };

        double slope = 1.0, intercept = 0.0;
        select_fit(xs, ys, slope, intercept);

        // Windows whose sync run caught too few packets produce stray minima;
        // one rejection round against the median residual removes them.
        std::vector<char> keep(mins.size(), 1);
        {
            std::vector<double> absres;
            for (std::size_t i = 0; i < xs.size(); ++i)
                absres.push_back(std::abs(ys[i] - (slope * xs[i] + intercept)));
            std::vector<double> sorted = absres;
            std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                             sorted.end());
            const double med = sorted[sorted.size() / 2];
            const double cutoff = std::max(6.0 * med, 1.5 * key.t_ris);
            std::vector<double> xs2, ys2;
            for (std::size_t i = 0; i < xs.size(); ++i)
            {
                if (absres[i] <= cutoff)
                {
                    xs2.push_back(xs[i]);
                    ys2.push_back(ys[i]);
                }
                else
                {
                    keep[i] = 0;
                }
            }
            if (!xs2.empty() && xs2.size() < xs.size())
            {
                xs.swap(xs2);
                ys.swap(ys2);
                select_fit(xs, ys, slope, intercept);
            }
            else
            {
                keep.assign(mins.size(), 1);
            }
        }
        est.drift = slope - 1.0;
        est.offset = intercept;

        for (std::size_t i = 0; i < mins.size(); ++i)
            if (keep[i])
                est.window_minima.push_back(mins[i].t_min);

        double ss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            const double r = ys[i] - (slope * xs[i] + intercept);
            ss += r * r;
        }
        est.residual = std::sqrt(ss / xs.size());

        // Offset refinement: each kept window brackets the true run end in
        // receiver time inside (t_min, t_next]; intersecting the implied
        // offset intervals beats the packet-quantized least squares fit.
        // Trimming tolerates a couple of windows whose run lost packets to
        // the jitter, and the consistency pass drops those windows from the
        // reported detections.
        {
            std::vector<double> lows, highs;
            std::vector<std::pair<double, double>> brackets(mins.size(),
                                                            {arma::datum::nan,
                                                             arma::datum::nan});
            for (std::size_t i = 0; i < mins.size(); ++i)
            {
                if (!keep[i])
                    continue;
                const auto it = ends.find(mins[i].window);
                if (it == ends.end())
                    continue;
                const double sched_end = slope * it->second;
                brackets[i] = {mins[i].t_min - sched_end, mins[i].t_next - sched_end};
                lows.push_back(brackets[i].first);
                highs.push_back(brackets[i].second);
            }
            if (!lows.empty())
            {
                std::sort(lows.begin(), lows.end(), std::greater<>());
                std::sort(highs.begin(), highs.end());
                if (std::getenv("RISMASK_SYNC_DEBUG"))
                {
                    std::fprintf(stderr, "sync brackets: ");
                    for (std::size_t q = 0; q < std::min<std::size_t>(4, lows.size()); ++q)
                        std::fprintf(stderr, "[lo%zu %.4f hi%zu %.4f] ", q, lows[q] * 1e3,
                                     q, highs[q] * 1e3);
                    std::fprintf(stderr, "ls_offset %.4f\n", est.offset * 1e3);
                }
                const std::size_t max_trim = std::min<std::size_t>(2, lows.size() - 1);
                for (std::size_t k = 0; k <= max_trim; ++k)
                    if (lows[k] <= highs[k])
                    {
                        est.offset = 0.5 * (lows[k] + highs[k]);
                        break;
                    }

                const double slack = key.t_ris;
                for (std::size_t i = 0; i < mins.size(); ++i)
                {
                    if (!keep[i] || std::isnan(brackets[i].first))
                        continue;
                    if (est.offset < brackets[i].first - slack ||
                        est.offset > brackets[i].second + slack)
                        keep[i] = 0;
                }
            }
        }

        est.window_minima.clear();
        std::vector<double> xs3, ys3;
        for (std::size_t i = 0; i < mins.size(); ++i)
        {
            if (!keep[i])
                continue;
            est.window_minima.push_back(mins[i].t_min);
            const auto it = ends.find(mins[i].window);
            if (it != ends.end())
            {
                xs3.push_back(it->second);
                ys3.push_back(0.5 * (mins[i].t_min + mins[i].t_next));
            }
        }
        if (xs3.size() >= 2)
        {
            double s3, i3;
            select_fit(xs3, ys3, s3, i3);
            est.drift = s3 - 1.0;
            est.residual = rms_of(xs3, ys3, s3, i3);
        }

        est.low_confidence = est.residual > residual_threshold;
        return est;
    }

    LabeledSequences label_configs(const CsiTrace &trace, const MaskingKey &key,
                                   const SyncEstimate &clock, double guard_fraction)
    {
        trace.validate();
        key.validate();
        if (guard_fraction < 0.0 || guard_fraction >= 0.5)
            throw std::invalid_argument("label_configs: guard fraction must lie in [0, 0.5)");

        LabeledSequences out;
        out.antennas = trace.antennas();
        out.subcarriers = trace.subcarriers();
        out.seq.resize(key.n_configs());
        if (trace.samples.empty())
            return out;

        const double scale = 1.0 + clock.drift;
        double max_corrected = 0.0;
        for (const auto &s : trace.samples)
            max_corrected = std::max(max_corrected, (s.timestamp - clock.offset) / scale);
        if (max_corrected <= 0.0)
        {
            out.dropped_outside = static_cast<int>(trace.samples.size());
            return out;
        }
        const MaskingSchedule sched = build_schedule(key, max_corrected + key.t_ris);
        const double guard = guard_fraction * key.t_ris;

        for (const auto &s : trace.samples)
        {
            const double tc = (s.timestamp - clock.offset) / scale;
            if (tc < 0.0)
            {
                ++out.dropped_outside;
                continue;
            }
            const auto slot = static_cast<std::size_t>(tc / key.t_ris);
            if (slot >= sched.slots.size())
            {
                ++out.dropped_outside;
                continue;
            }
            const double frac = tc - slot * key.t_ris;
            if (frac < guard || key.t_ris - frac < guard)
            {
                ++out.dropped_guard;
                continue;
            }
            if (sched.slots[slot].is_sync)
            {
                ++out.sync_excluded;
                continue;
            }
            out.seq[sched.slots[slot].config_index].emplace_back(tc, s.csi);
        }
        return out;
    }

    void remove_static(LabeledSequences &seqs)
    {
        for (auto &seq : seqs.seq)
        {
            if (seq.empty())
                continue;
            arma::cx_mat mean(seqs.antennas, seqs.subcarriers, arma::fill::zeros);
            for (const auto &[t, csi] : seq)
                mean += csi;
            mean /= static_cast<double>(seq.size());
            for (auto &[t, csi] : seq)
                csi -= mean;
        }
    }

    GainSolution estimate_relative_gains(
        const std::vector<std::vector<std::pair<double, cxd>>> &streams,
        double coherence_gap, int min_pair_count)
    {
        const int n_cfg = static_cast<int>(streams.size());
        if (n_cfg < 1)
            throw std::invalid_argument("estimate_relative_gains: no configurations");
        if (coherence_gap <= 0.0)
            throw std::invalid_argument("estimate_relative_gains: coherence gap must be > 0");

        GainSolution sol;
        sol.W.eye(n_cfg, n_cfg);
        sol.g.ones(n_cfg);
        sol.pair_counts.zeros(n_cfg, n_cfg);
        if (n_cfg == 1)
            return sol;

        // Chronological scan across all configurations.
        struct Obs
        {
            double t;
            int cfg;
            cxd v;
        };
        std::vector<Obs> all;
        for (int n = 0; n < n_cfg; ++n)
            for (const auto &[t, v] : streams[n])
                all.push_back({t, n, v});
        std::sort(all.begin(), all.end(), [](const Obs &a, const Obs &b) { return a.t < b.t; });

        arma::cx_mat num(n_cfg, n_cfg, arma::fill::zeros);
        arma::mat den(n_cfg, n_cfg, arma::fill::zeros);
        double noise_sq = 0.0; // per-sample noise power, from same-config pairs
        std::size_t noise_pairs = 0;
        for (std::size_t i = 0; i + 1 < all.size(); ++i)
        {
            const Obs &a = all[i];
            const Obs &b = all[i + 1];
            if (b.t - a.t >= coherence_gap)
                continue;
            if (a.cfg == b.cfg)
            {
                // The channel holds still inside the gap, so the difference
                // of same-configuration neighbors is pure noise.
                noise_sq += 0.5 * std::norm(a.v - b.v);
                ++noise_pairs;
                continue;
            }
            // Accumulate onto the (low, high) edge as ratio low/high; the
            // magnitude-weighted mean keeps near-zero denominators tame.
            const Obs &lo = a.cfg < b.cfg ? a : b;
            const Obs &hi = a.cfg < b.cfg ? b : a;
            num(lo.cfg, hi.cfg) += lo.v * std::conj(hi.v);
            den(lo.cfg, hi.cfg) += std::norm(hi.v);
            sol.pair_counts(lo.cfg, hi.cfg) += 1;
        }
        if (noise_pairs > 0)
            noise_sq /= static_cast<double>(noise_pairs);

        struct Edge
        {
            int a, b;
            cxd w;
        };
        std::vector<Edge> edges;
        for (int a = 0; a < n_cfg; ++a)
            for (int b = a + 1; b < n_cfg; ++b)
            {
                if (sol.pair_counts(a, b) < static_cast<arma::uword>(min_pair_count) ||
                    den(a, b) <= 0.0)
                    continue;
                // Remove the noise share of the denominator power; without
                // the correction the gains bias low by sigma^2 / P.
                const double raw = den(a, b);
                const double debiased =
                    raw - static_cast<double>(sol.pair_counts(a, b)) * noise_sq;
                const cxd w = num(a, b) / std::max(debiased, 0.25 * raw);
                sol.W(a, b) = w;
                sol.W(b, a) = std::abs(w) > 0.0 ? 1.0 / w : cxd(0.0, 0.0);
                edges.push_back({a, b, w});
            }

        // Connectivity of the usable-edge graph.
        std::vector<int> comp(n_cfg, -1);
        int n_comp = 0;
        for (int start = 0; start < n_cfg; ++start)
        {
            if (comp[start] >= 0)
                continue;
            std::vector<int> stack{start};
            comp[start] = n_comp;
            while (!stack.empty())
            {
                const int u = stack.back();
                stack.pop_back();
                for (const auto &e : edges)
                {
                    const int v = e.a == u ? e.b : (e.b == u ? e.a : -1);
                    if (v >= 0 && comp[v] < 0)
                    {
                        comp[v] = n_comp;
                        stack.push_back(v);
                    }
                }
            }
            ++n_comp;
        }
        if (n_comp > 1)
        {
            std::ostringstream msg;
            msg << "estimate_relative_gains: disconnected configuration graph;";
            for (int c = 0; c < n_comp; ++c)
            {
                msg << " {";
                bool first = true;
                for (int n = 0; n < n_cfg; ++n)
                    if (comp[n] == c)
                    {
                        msg << (first ? "" : ",") << n;
                        first = false;
                    }
                msg << "}";
            }
            throw std::runtime_error(msg.str());
        }

        // min sum_edges |g_a - w g_b|^2 with g[0] = 1, via least squares on
        // the reduced unknowns.
        arma::cx_mat A(edges.size(), n_cfg - 1, arma::fill::zeros);
        arma::cx_vec rhs(edges.size(), arma::fill::zeros);
        for (std::size_t e = 0; e < edges.size(); ++e)
        {
            const auto &ed = edges[e];
            if (ed.a == 0)
                rhs(e) = -1.0;
            else
                A(e, ed.a - 1) = 1.0;
            A(e, ed.b - 1) -= ed.w;
        }
        arma::cx_vec g_red;
        if (!arma::solve(g_red, A, rhs))
            throw std::runtime_error("estimate_relative_gains: least squares solve failed");
        for (int n = 1; n < n_cfg; ++n)
            sol.g(n) = g_red(n - 1);
        sol.residual = std::pow(arma::norm(A * g_red - rhs), 2);
        return sol;
    }

    MergedSeries normalize_and_merge(const LabeledSequences &seqs,
                                     const std::vector<GainSolution> &gains_per_stream)
    {
        const int A = seqs.antennas;
        const int F = seqs.subcarriers;
        if (gains_per_stream.size() != static_cast<std::size_t>(A) * F)
            throw std::invalid_argument("normalize_and_merge: one gain solution per stream");
        const int n_cfg = static_cast<int>(seqs.seq.size());
        for (const auto &gs : gains_per_stream)
        {
            if (gs.g.n_elem != static_cast<arma::uword>(n_cfg))
                throw std::invalid_argument("normalize_and_merge: gain count mismatch");
            for (const cxd g : gs.g)
                if (!std::isfinite(std::abs(g)) || std::abs(g) <= 0.0)
                    throw std::runtime_error("normalize_and_merge: invalid gain");
        }

        std::vector<std::pair<double, arma::cx_mat>> merged;
        for (int n = 0; n < n_cfg; ++n)
            for (const auto &[t, csi] : seqs.seq[n])
            {
                arma::cx_mat scaled(A, F);
                for (int a = 0; a < A; ++a)
                    for (int f = 0; f < F; ++f)
                        scaled(a, f) = csi(a, f) / gains_per_stream[a * F + f].g(n);
                merged.emplace_back(t, std::move(scaled));
            }
        std::stable_sort(merged.begin(), merged.end(),
                         [](const auto &a, const auto &b) { return a.first < b.first; });

        MergedSeries out;
        out.t.reserve(merged.size());
        out.v.reserve(merged.size());
        for (auto &[t, m] : merged)
        {
            out.t.push_back(t);
            out.v.push_back(std::move(m));
        }
        return out;
    }

    MergedSeries lowpass(const MergedSeries &series, double cutoff_hz, int taps)
    {
        if (taps < 3 || taps % 2 == 0)
            throw std::invalid_argument("lowpass: taps must be odd and >= 3");
        const std::size_t n = series.t.size();
        if (n < static_cast<std::size_t>(taps) || n < 2)
            return series; // too short to filter; caller records the warning

        const double span = series.t.back() - series.t.front();
        const double rate = static_cast<double>(n - 1) / span;
        if (cutoff_hz >= 0.5 * rate)
            throw std::invalid_argument("lowpass: cutoff must stay below half the mean rate");

        // Windowed-sinc kernel, DC gain exactly one.
        const int mid = taps / 2;
        arma::vec h(taps);
        const double fc = cutoff_hz / rate;
        for (int i = 0; i < taps; ++i)
        {
            const int m = i - mid;
            const double win = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (taps - 1));
            h(i) = m == 0 ? 2.0 * fc * win
                          : std::sin(2.0 * M_PI * fc * m) / (M_PI * m) * win;
        }
        h /= arma::accu(h);

        const int A = static_cast<int>(series.v[0].n_rows);
        const int F = static_cast<int>(series.v[0].n_cols);
        const double dt = span / static_cast<double>(n - 1);

        MergedSeries out;
        out.t = series.t;
        out.v.assign(n, arma::cx_mat(A, F));

        arma::cx_vec uniform(n), filtered(n), orig(n);
        for (int a = 0; a < A; ++a)
            for (int f = 0; f < F; ++f)
            {
                for (std::size_t i = 0; i < n; ++i)
                    orig(i) = series.v[i](a, f);

                // Linear interpolation onto the mean-rate grid.
                std::size_t j = 0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    const double t = series.t.front() + static_cast<double>(i) * dt;
                    while (j + 1 < n && series.t[j + 1] < t)
                        ++j;
                    if (j + 1 >= n)
                        uniform(i) = orig(n - 1);
                    else
                    {
                        const double t0 = series.t[j];
                        const double t1 = series.t[j + 1];
                        const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
                        uniform(i) = (1.0 - w) * orig(j) + w * orig(j + 1);
                    }
                }

                // Reflect-padded convolution keeps the edges flat.
                for (std::size_t i = 0; i < n; ++i)
                {
                    cxd acc = 0.0;
                    for (int m = 0; m < taps; ++m)
                    {
                        std::int64_t idx = static_cast<std::int64_t>(i) + m - mid;
                        if (idx < 0)
                            idx = -idx;
                        if (idx >= static_cast<std::int64_t>(n))
                            idx = 2 * static_cast<std::int64_t>(n) - 2 - idx;
                        acc += h(m) * uniform(idx);
                    }
                    filtered(i) = acc;
                }

                // Sample back at the original timestamps.
                for (std::size_t i = 0; i < n; ++i)
                {
                    const double pos = (series.t[i] - series.t.front()) / dt;
                    const auto i0 = static_cast<std::size_t>(
                        std::clamp(std::floor(pos), 0.0, static_cast<double>(n - 1)));
                    const std::size_t i1 = std::min(i0 + 1, n - 1);
                    const double w = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
                    out.v[i](a, f) = (1.0 - w) * filtered(i0) + w * filtered(i1);
                }
            }
        return out;
    }

    namespace
    {
        [[noreturn]] void stage_fail(const std::string &stage, const std::exception &e)
        {
            throw std::runtime_error("demask_pipeline[" + stage + "]: " + e.what());
        }
    } // namespace

    DemaskOutput demask_pipeline(const CsiTrace &trace, const MaskingKey &key,
                                 const DemaskParams &params)
    {
        DemaskOutput out;

        RatioSeries ratios;
        try
        {
            ratios = csi_ratio(trace);
        }
        catch (const std::exception &e)
        {
            stage_fail("csi_ratio", e);
        }
        out.diagnostics.dropped_ratio_samples = ratios.dropped;

        // 2.25 slots: wide enough for three packets at spacings up to 1.1
        // slots, narrow enough to fit inside a sync run; the nominal 3-slot
        // span only dips when the packet phase happens to line up.
        const double window = params.cv_window > 0.0 ? params.cv_window
                                                     : 2.25 * key.t_ris;
        AggregateCv agg;
        try
        {
            agg = aggregate_cv(coefficient_of_variation(ratios, window));
        }
        catch (const std::exception &e)
        {
            stage_fail("coefficient_of_variation", e);
        }

        try
        {
            out.diagnostics.sync = detect_sync(agg, key, params.sync_residual_threshold);
        }
        catch (const std::exception &e)
        {
            stage_fail("detect_sync", e);
        }

        LabeledSequences labeled;
        try
        {
            labeled = label_configs(trace, key, out.diagnostics.sync, params.guard_fraction);
        }
        catch (const std::exception &e)
        {
            stage_fail("label_configs", e);
        }
        out.diagnostics.dropped_guard = labeled.dropped_guard;
        out.diagnostics.dropped_outside = labeled.dropped_outside;
        out.diagnostics.sync_excluded = labeled.sync_excluded;

        try
        {
            remove_static(labeled);
        }
        catch (const std::exception &e)
        {
            stage_fail("remove_static", e);
        }

        const int A = labeled.antennas;
        const int F = labeled.subcarriers;
        const int n_cfg = static_cast<int>(labeled.seq.size());
        std::vector<GainSolution> gains;
        gains.reserve(static_cast<std::size_t>(A) * F);
        try
        {
            double res_sum = 0.0;
            out.diagnostics.pair_counts.zeros(n_cfg, n_cfg);
            for (int a = 0; a < A; ++a)
                for (int f = 0; f < F; ++f)
                {
                    std::vector<std::vector<std::pair<double, cxd>>> streams(n_cfg);
                    for (int n = 0; n < n_cfg; ++n)
                    {
                        streams[n].reserve(labeled.seq[n].size());
                        for (const auto &[t, csi] : labeled.seq[n])
                            streams[n].emplace_back(t, csi(a, f));
                    }
                    GainSolution sol = estimate_relative_gains(streams, params.coherence_gap,
                                                               params.min_pair_count);
                    // Degenerate estimates (no coherent dynamics to ratio,
                    // e.g. an idle scene) fall back to unit gains instead of
                    // amplifying noise through a near-zero divisor.
                    double g_min = arma::datum::inf;
                    for (const cxd g : sol.g)
                        g_min = std::min(g_min, std::abs(g));
                    if (g_min < 0.05 || !sol.g.is_finite())
                    {
                        sol.g.ones();
                        out.diagnostics.warnings.push_back(
                            "unit-gain fallback for stream " + std::to_string(a) + "," +
                            std::to_string(f));
                    }
                    res_sum += sol.residual;
                    out.diagnostics.gain_residual_max =
                        std::max(out.diagnostics.gain_residual_max, sol.residual);
                    out.diagnostics.pair_counts += sol.pair_counts;
                    gains.push_back(std::move(sol));
                }
            if (!gains.empty())
                out.diagnostics.gain_residual_mean = res_sum / gains.size();
        }
        catch (const std::exception &e)
        {
            stage_fail("estimate_relative_gains", e);
        }

        MergedSeries merged;
        try
        {
            merged = normalize_and_merge(labeled, gains);
        }
        catch (const std::exception &e)
        {
            stage_fail("normalize_and_merge", e);
        }

        try
        {
            if (merged.t.size() < static_cast<std::size_t>(params.filter_taps))
            {
                out.diagnostics.warnings.push_back(
                    "lowpass skipped: sequence shorter than the filter");
                out.cleaned = std::move(merged);
            }
            else
            {
                out.cleaned = lowpass(merged, params.cutoff_hz, params.filter_taps);
            }
        }
        catch (const std::exception &e)
        {
            stage_fail("lowpass", e);
        }
        return out;
    }

} // namespace rismask
