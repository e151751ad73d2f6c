// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_channel_H
#define rismask_channel_H

#include <armadillo>
#include <complex>

#include "rismask/geometry.hpp"

namespace rismask
{

    // Per-row channels. Columns index rows of the RIS, each column has one
    // entry per element.
    //   tx    : h^T_k, Tx to RIS row k
    //   comm  : h^C_k, effective Tx->row->comm-Rx channel (pathloss included)
    //   sense : h^S_k, effective Tx->row->target-direction channel
    struct RowChannels
    {
        arma::cx_mat tx;    // N x K
        arma::cx_mat comm;  // N x K
        arma::cx_mat sense; // N x K

        int row_count() const { return static_cast<int>(tx.n_cols); }
        int elements_per_row() const { return static_cast<int>(tx.n_rows); }
    };

    // Uniform-linear-array steering vector [e^{j 2 pi spacing m sin(angle)}],
    // m = 0..count-1. Requires count >= 1 and |angle| < pi/2.
    arma::cx_vec steering_vector(double angle_rad, int count, double spacing);

    // Free-space Tx->element channels: amplitude lambda / (4 pi d), phase
    // -2 pi d / lambda per element distance d. Returns N x K.
    arma::cx_mat tx_ris_channel(const ScenarioGeometry &geom);

    // h^C_k = (a_k^C alpha^H(comm_aod) Diag(h^T_k))^H
    // h^S_k = (alpha^H(sense_aod) Diag(h^T_k))^H
    RowChannels effective_channels(const ScenarioGeometry &geom, const arma::cx_mat &h_tx);

    // M_comm * |sum_k (h^C_k)^H phi_k|^2 * tx_power / noise_power.
    // phis is N x K, one unit-modulus column per row.
    double comm_snr(const RowChannels &rows, const arma::cx_mat &phis,
                    double tx_power, double noise_power, int comm_antennas);

    // |(h^S_k)^H phi|^2 * tx_power for one row.
    double sensing_power(const arma::cx_vec &h_sense_row, const arma::cx_vec &phi,
                         double tx_power);

    // CSI at the sensing Rx for one instant:
    //   sum_k (dyn_k alpha(sense_aoa) alpha^H(sense_aod) + S_k) Diag(phi_k) h^T_k
    // dynamic_gain carries the instantaneous complex target amplitude per row,
    // static_path the per-row other-path matrices (M_sense x N x K).
    arma::cx_vec aggregate_sensing_csi(const ScenarioGeometry &geom,
                                       const arma::cx_mat &h_tx,
                                       const arma::cx_mat &phis,
                                       const arma::cx_vec &dynamic_gain,
                                       const arma::cx_cube &static_path);

} // namespace rismask

#endif
