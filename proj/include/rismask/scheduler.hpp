// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_scheduler_H
#define rismask_scheduler_H

#include <cstdint>
#include <vector>

namespace rismask
{

    // Per-row vector selection: bit k = 0 picks phi_{k,1}, 1 picks phi_{k,2}.
    struct RisConfiguration
    {
        std::vector<std::uint8_t> selection;

        bool operator==(const RisConfiguration &o) const { return selection == o.selection; }
    };

    // Shared secret between the Tx-side scheduler and the Rx-side demasker.
    struct MaskingKey
    {
        std::uint64_t seed = 1;
        std::vector<RisConfiguration> candidates; // N^R distinct selections
        RisConfiguration sync_config;             // held during sync segments
        double t_ris = 2e-3;                      // configuration switching period, s
        double t_sync = 0.5;                      // sync embedding interval, s
        int sync_len = 3;                         // sync run length in slots

        int n_configs() const { return static_cast<int>(candidates.size()); }
        int row_count() const
        {
            return candidates.empty() ? 0 : static_cast<int>(candidates[0].selection.size());
        }
        void validate() const;
    };

    struct MaskingSchedule
    {
        struct Slot
        {
            double start_time = 0.0;
            int config_index = 0; // index into key.candidates; -1 for sync slots
            bool is_sync = false;
        };
        std::vector<Slot> slots;
        double t_ris = 0.0;
    };

    // n_configs distinct K-bit selections drawn uniformly without replacement.
    std::vector<RisConfiguration> generate_candidates(int row_count, int n_configs,
                                                      std::uint64_t seed);

    // Key with seeded candidates, an all-zeros sync configuration and the
    // stated timing defaults.
    // sync_len of 4 slots keeps at least three packets inside every run at
    // packet spacings up to 1.1 slots, so each window carries a clean dip.
    MaskingKey make_key(int row_count, int n_configs, std::uint64_t seed,
                        double t_ris = 2e-3, double t_sync = 0.5, int sync_len = 4);

    // Slot sequence covering [0, duration): one sync run per t_sync window at
    // a seeded offset, all other slots drawn uniformly over the candidates.
    // Construction is prefix-stable: replaying with a longer duration
    // reproduces every earlier slot bit-exactly.
    MaskingSchedule build_schedule(const MaskingKey &key, double duration);

    // Configuration each packet experiences when the RIS only switches at the
    // first trigger inside each t_ris period. Packets must be sorted and
    // non-overlapping; mid-packet switches are impossible by construction and
    // checked.
    std::vector<int> packet_triggered_timeline(const MaskingSchedule &schedule,
                                               const std::vector<double> &packet_times,
                                               const std::vector<double> &packet_durations);

} // namespace rismask

#endif
