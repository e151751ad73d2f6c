// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_io_H
#define rismask_io_H

#include <string>
#include <vector>

#include "rismask/sim.hpp"

namespace rismask
{

    // Scenario configuration document. Field names inside the "geometry",
    // "optimizer", "key" and "simulation" sections follow the domain types.
    struct ScenarioFile
    {
        ScenarioGeometry geometry;
        OptimizerConfig optimizer;
        Scenario scenario; // key/pairs filled by the caller
        bool has_key = false;
        MaskingKey key;
        int key_n_configs = 4;
    };

    ScenarioFile load_scenario_file(const std::string &path);

    void save_optimizer_result(const OptimizerResult &result, const std::string &path);
    OptimizerResult load_optimizer_result(const std::string &path);

    void save_key(const MaskingKey &key, const std::string &path);
    MaskingKey load_key(const std::string &path);

    // Line-delimited schedule records: start_time_ns,config_index,is_sync.
    void save_schedule(const MaskingSchedule &schedule, const std::string &path);

    // Line-delimited CSI records: timestamp_ns,antenna,subcarrier,real,imag.
    void save_trace(const CsiTrace &trace, const std::string &path);
    CsiTrace load_trace(const std::string &path);

    void save_merged_series(const MergedSeries &series, const std::string &path);

    void save_objective_trace_csv(const std::vector<double> &trace,
                                  const std::string &path);
    void save_beampattern_csv(const std::vector<BeampatternPoint> &points,
                              const std::string &path);
    void save_snr_series_csv(const std::vector<double> &times,
                             const std::vector<double> &snr_db,
                             const std::string &path);

    void save_run_report(const RunReport &report, const std::string &path);
    void save_diagnostics(const DemaskDiagnostics &diag, const std::string &path);

    // Per-run manifest: inputs, seeds and the library version.
    void save_manifest(const std::vector<std::pair<std::string, std::string>> &entries,
                       const std::string &path);

} // namespace rismask

#endif
