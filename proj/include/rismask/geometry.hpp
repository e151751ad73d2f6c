// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_geometry_H
#define rismask_geometry_H

#include <armadillo>

namespace rismask
{

    inline constexpr double c_speed_of_light = 299792458.0;

    // Physical layout and link constants for one deployment. The single
    // source of every channel symbol used by the other modules.
    struct ScenarioGeometry
    {
        int row_count = 8;            // K, RIS rows
        int elements_per_row = 16;    // N, elements in one row
        int comm_antennas = 3;        // M_comm, communication Rx antennas
        int sense_antennas = 3;       // M_sense, sensing Rx antennas (1..3 typical)
        double carrier_freq = 5.22e9; // Hz
        double element_spacing = 0.5; // fraction of wavelength

        arma::vec tx_position = {0.0, 0.0, 1.0}; // meters, shared frame
        arma::mat element_positions;             // 3 x (K*N), column-major by (k, n)

        double theta_comm_aod = 0.0;  // radians from RIS normal, departure to comm Rx
        double theta_sense_aod = 0.0; // radians from RIS normal, departure to target
        double theta_comm_aoa = 0.0;  // radians at comm Rx
        double theta_sense_aoa = 0.0; // radians at sensing Rx

        arma::vec pathloss_comm;  // a_k^C, per-row linear amplitude, length K
        arma::vec pathloss_sense; // a_k^S, per-row linear amplitude, length K

        double tx_power = 1.0;      // watts
        double noise_power = 1e-10; // watts

        double wavelength() const { return c_speed_of_light / carrier_freq; }

        arma::vec element_position(int k, int n) const
        {
            return element_positions.col(static_cast<arma::uword>(k) * elements_per_row + n);
        }

        // Throws std::invalid_argument naming the offending field.
        void validate() const;
    };

    // Planar grid centered at the origin in the z = 0 plane (normal +z),
    // rows stacked along -y, elements along +x, spaced by element_spacing
    // wavelengths. Tx on boresight at the given range.
    ScenarioGeometry make_grid_geometry(int rows, int elements_per_row,
                                        double carrier_freq = 5.22e9,
                                        double element_spacing = 0.5,
                                        double tx_range = 1.0);

    // The measurement setup used throughout: 8x16 RIS at 5.22 GHz, sensing
    // direction 50 deg, communication direction -20 deg.
    ScenarioGeometry default_geometry();

} // namespace rismask

#endif
