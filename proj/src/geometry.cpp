// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rismask/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rismask
{

    namespace
    {
        void require(bool ok, const std::string &field, const std::string &what)
        {
            if (!ok)
                throw std::invalid_argument("ScenarioGeometry." + field + ": " + what);
        }

        bool angle_ok(double a) { return std::isfinite(a) && std::abs(a) < M_PI / 2.0; }
    } // namespace

    void ScenarioGeometry::validate() const
    {
        require(row_count >= 1, "K", "must be >= 1");
        require(elements_per_row >= 1, "N", "must be >= 1");
        require(comm_antennas >= 1, "M_comm", "must be >= 1");
        require(sense_antennas >= 1, "M_sense", "must be >= 1");
        require(carrier_freq > 0.0, "carrier_freq", "must be > 0");
        require(element_spacing > 0.0, "element_spacing", "must be > 0");
        require(tx_power > 0.0, "tx_power", "must be > 0");
        require(noise_power > 0.0, "noise_power", "must be > 0");
        require(angle_ok(theta_comm_aod), "theta_comm_aod", "must lie in (-pi/2, pi/2)");
        require(angle_ok(theta_sense_aod), "theta_sense_aod", "must lie in (-pi/2, pi/2)");
        require(angle_ok(theta_comm_aoa), "theta_comm_aoa", "must lie in (-pi/2, pi/2)");
        require(angle_ok(theta_sense_aoa), "theta_sense_aoa", "must lie in (-pi/2, pi/2)");
        require(tx_position.n_elem == 3, "tx_position", "must have 3 coordinates");

        const arma::uword total = static_cast<arma::uword>(row_count) * elements_per_row;
        require(element_positions.n_rows == 3 && element_positions.n_cols == total,
                "ris_element_positions", "must hold exactly K*N positions");
        require(pathloss_comm.n_elem == static_cast<arma::uword>(row_count),
                "pathloss_comm", "must have one entry per row");
        require(pathloss_sense.n_elem == static_cast<arma::uword>(row_count),
                "pathloss_sense", "must have one entry per row");
        require(pathloss_comm.is_finite() && pathloss_sense.is_finite(),
                "pathloss", "entries must be finite");
    }

    ScenarioGeometry make_grid_geometry(int rows, int elements_per_row,
                                        double carrier_freq, double element_spacing,
                                        double tx_range)
    {
        ScenarioGeometry g;
        g.row_count = rows;
        g.elements_per_row = elements_per_row;
        g.carrier_freq = carrier_freq;
        g.element_spacing = element_spacing;
        g.tx_position = {0.0, 0.0, tx_range};

        const double d = element_spacing * g.wavelength();
        g.element_positions.set_size(3, static_cast<arma::uword>(rows) * elements_per_row);
        for (int k = 0; k < rows; ++k)
            for (int n = 0; n < elements_per_row; ++n)
            {
                const arma::uword idx = static_cast<arma::uword>(k) * elements_per_row + n;
                g.element_positions(0, idx) = (n - (elements_per_row - 1) / 2.0) * d;
                g.element_positions(1, idx) = -(k - (rows - 1) / 2.0) * d;
                g.element_positions(2, idx) = 0.0;
            }

        g.pathloss_comm = arma::ones(rows);
        g.pathloss_sense = arma::ones(rows);
        return g;
    }

    ScenarioGeometry default_geometry()
    {
        ScenarioGeometry g = make_grid_geometry(8, 16);
        g.theta_sense_aod = 50.0 * M_PI / 180.0;
        g.theta_comm_aod = -20.0 * M_PI / 180.0;
        g.theta_sense_aoa = 50.0 * M_PI / 180.0;
        g.theta_comm_aoa = -20.0 * M_PI / 180.0;
        return g;
    }

} // namespace rismask
