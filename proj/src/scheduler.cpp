// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rismask/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "rismask/rng.hpp"

namespace rismask
{

    void MaskingKey::validate() const
    {
        if (candidates.empty())
            throw std::invalid_argument("MaskingKey: candidate set must not be empty");
        const std::size_t K = candidates[0].selection.size();
        if (K == 0)
            throw std::invalid_argument("MaskingKey: empty selections");
        for (const auto &c : candidates)
            if (c.selection.size() != K)
                throw std::invalid_argument("MaskingKey: inconsistent selection lengths");
        if (sync_config.selection.size() != K)
            throw std::invalid_argument("MaskingKey: sync_config length mismatch");
        for (std::size_t i = 0; i < candidates.size(); ++i)
            for (std::size_t j = i + 1; j < candidates.size(); ++j)
                if (candidates[i] == candidates[j])
                    throw std::invalid_argument("MaskingKey: candidates must be pairwise distinct");
        if (t_ris <= 0.0)
            throw std::invalid_argument("MaskingKey: t_ris must be > 0");
        if (sync_len < 1)
            throw std::invalid_argument("MaskingKey: sync_len must be >= 1");
        if (t_sync < sync_len * t_ris)
            throw std::invalid_argument("MaskingKey: t_sync must cover the sync run");
    }

    std::vector<RisConfiguration> generate_candidates(int row_count, int n_configs,
                                                      std::uint64_t seed)
    {
        if (row_count < 1)
            throw std::invalid_argument("generate_candidates: row count must be >= 1");
        if (n_configs < 2)
            throw std::invalid_argument("generate_candidates: need at least 2 configurations");
        if (row_count < 63 && static_cast<std::uint64_t>(n_configs) > (1ULL << row_count))
            throw std::invalid_argument("generate_candidates: more configurations than selections");

        // Per-row balanced draw: every row selects its second vector in half
        // of the candidates (one extra when the count is odd), so the
        // activated set's aggregate dynamic response averages to zero and no
        // sensing residue survives an attacker's smoothing. Complementary
        // candidates are rejected because a pair's responses negate and the
        // receiver-side antenna ratios cannot tell them apart; a minimum
        // pairwise distance keeps every configuration change detectable.
        Rng rng(seed);
        const int n = n_configs;
        const int min_distance = std::max(1, std::min(3, row_count / 2));
        // With more than half of all selections in play, complements cannot
        // be avoided.
        const bool allow_complements =
            n <= 2 || (row_count < 63 && static_cast<std::uint64_t>(n) >
                                             (1ULL << (row_count - 1)));

        for (int attempt = 0; attempt < 10000; ++attempt)
        {
            std::vector<std::vector<std::uint8_t>> cols(row_count,
                                                        std::vector<std::uint8_t>(n, 0));
            for (int k = 0; k < row_count; ++k)
            {
                const int ones = n / 2 + ((n % 2 != 0 && rng.uniform_index(2) != 0) ? 1 : 0);
                std::vector<std::uint8_t> &col = cols[k];
                std::fill(col.begin(), col.begin() + ones, 1);
                for (int i = n - 1; i > 0; --i)
                    std::swap(col[i], col[rng.uniform_index(i + 1)]);
            }

            std::vector<RisConfiguration> out(n);
            for (int i = 0; i < n; ++i)
            {
                out[i].selection.resize(row_count);
                for (int k = 0; k < row_count; ++k)
                    out[i].selection[k] = cols[k][i];
            }

            bool ok = true;
            for (int i = 0; i < n && ok; ++i)
                for (int j = i + 1; j < n && ok; ++j)
                {
                    int dist = 0;
                    for (int k = 0; k < row_count; ++k)
                        dist += out[i].selection[k] != out[j].selection[k];
                    if (dist < min_distance && dist < row_count)
                        ok = false;
                    if (dist == row_count && !allow_complements)
                        ok = false; // complements are ratio-ambiguous
                    if (dist == 0)
                        ok = false;
                }
            if (ok)
                return out;
        }
        throw std::invalid_argument(
            "generate_candidates: no feasible candidate set for these parameters");
    }

    MaskingKey make_key(int row_count, int n_configs, std::uint64_t seed,
                        double t_ris, double t_sync, int sync_len)
    {
        MaskingKey key;
        key.seed = seed;
        key.candidates = generate_candidates(row_count, n_configs,
                                             Rng::derive_seed(seed, 0x11));
        key.sync_config.selection.assign(row_count, 0);
        key.t_ris = t_ris;
        key.t_sync = t_sync;
        key.sync_len = sync_len;
        key.validate();
        return key;
    }

    MaskingSchedule build_schedule(const MaskingKey &key, double duration)
    {
        key.validate();
        if (duration <= 0.0)
            throw std::invalid_argument("build_schedule: duration must be > 0");

        const int n_cand = key.n_configs();
        // Value identity used for constant-run tracking; the sync value maps
        // onto a coinciding candidate when one exists.
        int sync_value = n_cand;
        for (int j = 0; j < n_cand; ++j)
            if (key.candidates[j] == key.sync_config)
                sync_value = j;

        const std::int64_t n_slots =
            static_cast<std::int64_t>(std::ceil(duration / key.t_ris - 1e-12));
        const double slots_per_window = key.t_sync / key.t_ris;

        MaskingSchedule sched;
        sched.t_ris = key.t_ris;
        sched.slots.reserve(n_slots);

        Rng rng(Rng::derive_seed(key.seed, 0x5c));
        int prev1 = -1; // value of the previous slot
        int prev2 = -1; // value two slots back

        for (std::int64_t window = 0; static_cast<std::int64_t>(sched.slots.size()) < n_slots;
             ++window)
        {
            const std::int64_t s0 =
                static_cast<std::int64_t>(std::ceil(window * slots_per_window - 1e-9));
            const std::int64_t s1 =
                static_cast<std::int64_t>(std::ceil((window + 1) * slots_per_window - 1e-9));
            const std::int64_t last_fit = static_cast<std::int64_t>(
                std::floor((window + 1) * slots_per_window + 1e-9)) - key.sync_len;

            // Keep one non-sync slot on each side of the run when the window
            // has room, so a run never touches a window boundary.
            std::int64_t lo = s0;
            std::int64_t hi = std::min(s1 - 1 - (key.sync_len - 1), last_fit);
            if (hi - lo >= 2)
            {
                ++lo;
                --hi;
            }
            if (hi < lo)
                hi = lo;
            const std::int64_t sync_start = lo + static_cast<std::int64_t>(
                rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));

            for (std::int64_t s = s0; s < s1 && static_cast<std::int64_t>(sched.slots.size()) < n_slots; ++s)
            {
                MaskingSchedule::Slot slot;
                slot.start_time = static_cast<double>(s) * key.t_ris;
                int value;
                if (s >= sync_start && s < sync_start + key.sync_len)
                {
                    slot.is_sync = true;
                    slot.config_index = -1;
                    value = sync_value;
                }
                else
                {
                    // A non-sync slot must differ from the previous two slot
                    // values and from a sync run starting within two slots.
                    // Packets arrive at least every other slot, so this makes
                    // three consecutive equal-configuration packets possible
                    // only inside a sync run, which is what the receiver's
                    // static-segment detector relies on.
                    std::vector<int> allowed;
                    const bool near_sync = (s + 1 == sync_start || s + 2 == sync_start);
                    for (int c = 0; c < n_cand; ++c)
                        if (c != prev1 && !(near_sync && c == sync_value))
                            allowed.push_back(c);
                    if (allowed.empty())
                        for (int c = 0; c < n_cand; ++c)
                            allowed.push_back(c);
                    std::vector<int> strict;
                    for (const int c : allowed)
                        if (c != prev2)
                            strict.push_back(c);
                    if (!strict.empty())
                        allowed.swap(strict);
                    const int draw = allowed[rng.uniform_index(allowed.size())];
                    slot.config_index = draw;
                    value = draw;
                }
                prev2 = prev1;
                prev1 = value;
                sched.slots.push_back(slot);
            }
        }
        return sched;
    }

    std::vector<int> packet_triggered_timeline(const MaskingSchedule &schedule,
                                               const std::vector<double> &packet_times,
                                               const std::vector<double> &packet_durations)
    {
        if (schedule.slots.empty() || schedule.t_ris <= 0.0)
            throw std::invalid_argument("packet_triggered_timeline: empty schedule");
        if (packet_durations.size() != packet_times.size() && packet_durations.size() != 1)
            throw std::invalid_argument("packet_triggered_timeline: duration count mismatch");

        auto duration_of = [&](std::size_t i) {
            return packet_durations.size() == 1 ? packet_durations[0] : packet_durations[i];
        };

        for (std::size_t i = 0; i + 1 < packet_times.size(); ++i)
            if (packet_times[i + 1] < packet_times[i] + duration_of(i))
                throw std::invalid_argument("packet_triggered_timeline: packets overlap");

        std::vector<int> configs;
        configs.reserve(packet_times.size());

        std::int64_t active_period = -1;
        int active_config = 0;
        double last_switch = -1.0;

        for (std::size_t i = 0; i < packet_times.size(); ++i)
        {
            const double t = packet_times[i];
            if (t < 0.0)
                throw std::invalid_argument("packet_triggered_timeline: negative packet time");
            const std::int64_t period = static_cast<std::int64_t>(t / schedule.t_ris);
            if (period >= static_cast<std::int64_t>(schedule.slots.size()))
                throw std::invalid_argument("packet_triggered_timeline: packet beyond schedule");
            if (period != active_period)
            {
                // First trigger within this period: the RIS switches now.
                active_period = period;
                active_config = schedule.slots[static_cast<std::size_t>(period)].config_index;
                last_switch = t;
            }
            // A switch strictly inside an earlier packet would break its
            // demodulation; impossible with non-overlapping packets.
            if (i > 0)
            {
                const double prev_start = packet_times[i - 1];
                const double prev_end = prev_start + duration_of(i - 1);
                if (last_switch > prev_start && last_switch < prev_end)
                    throw std::logic_error(
                        "packet_triggered_timeline: switch occurred mid-packet");
            }
            configs.push_back(active_config);
        }
        return configs;
    }

} // namespace rismask
