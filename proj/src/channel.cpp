// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rismask/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace rismask
{

    arma::cx_vec steering_vector(double angle_rad, int count, double spacing)
    {
        if (!std::isfinite(angle_rad))
            throw std::invalid_argument("steering_vector: angle must be finite");
        if (count < 1)
            throw std::invalid_argument("steering_vector: count must be >= 1");
        if (std::abs(angle_rad) >= M_PI / 2.0)
            throw std::invalid_argument("steering_vector: angle must lie in (-pi/2, pi/2)");

        arma::cx_vec a(count);
        const double step = 2.0 * M_PI * spacing * std::sin(angle_rad);
        for (int m = 0; m < count; ++m)
            a(m) = std::polar(1.0, step * m);
        return a;
    }

    arma::cx_mat tx_ris_channel(const ScenarioGeometry &geom)
    {
        geom.validate();
        const double lambda = geom.wavelength();
        const int K = geom.row_count;
        const int N = geom.elements_per_row;

        arma::cx_mat h(N, K);
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < N; ++n)
            {
                const double d = arma::norm(geom.element_position(k, n) - geom.tx_position);
                if (d <= 0.0)
                    throw std::invalid_argument(
                        "tx_ris_channel: degenerate geometry, Tx coincides with an element");
                h(n, k) = std::polar(lambda / (4.0 * M_PI * d), -2.0 * M_PI * d / lambda);
            }
        return h;
    }

    RowChannels effective_channels(const ScenarioGeometry &geom, const arma::cx_mat &h_tx)
    {
        const int K = geom.row_count;
        const int N = geom.elements_per_row;
        if (h_tx.n_rows != static_cast<arma::uword>(N) ||
            h_tx.n_cols != static_cast<arma::uword>(K))
            throw std::invalid_argument("effective_channels: h_tx must be N x K");

        const arma::cx_vec a_comm = steering_vector(geom.theta_comm_aod, N, geom.element_spacing);
        const arma::cx_vec a_sense = steering_vector(geom.theta_sense_aod, N, geom.element_spacing);

        RowChannels rows;
        rows.tx = h_tx;
        rows.comm.set_size(N, K);
        rows.sense.set_size(N, K);
        // (a alpha^H Diag(h))^H = a * conj(h) % alpha, elementwise
        for (int k = 0; k < K; ++k)
        {
            const arma::cx_vec conj_h = arma::conj(h_tx.col(k));
            rows.comm.col(k) = geom.pathloss_comm(k) * (conj_h % a_comm);
            rows.sense.col(k) = conj_h % a_sense;
        }
        return rows;
    }

    double comm_snr(const RowChannels &rows, const arma::cx_mat &phis,
                    double tx_power, double noise_power, int comm_antennas)
    {
        if (noise_power <= 0.0)
            throw std::invalid_argument("comm_snr: noise power must be > 0");
        if (phis.n_rows != rows.comm.n_rows || phis.n_cols != rows.comm.n_cols)
            throw std::invalid_argument("comm_snr: selection shape mismatch");

        std::complex<double> sum = 0.0;
        for (arma::uword k = 0; k < phis.n_cols; ++k)
            sum += arma::cdot(rows.comm.col(k), phis.col(k));
        return comm_antennas * std::norm(sum) * tx_power / noise_power;
    }

    double sensing_power(const arma::cx_vec &h_sense_row, const arma::cx_vec &phi,
                         double tx_power)
    {
        if (h_sense_row.n_elem != phi.n_elem)
            throw std::invalid_argument("sensing_power: shape mismatch");
        return std::norm(arma::cdot(h_sense_row, phi)) * tx_power;
    }

    arma::cx_vec aggregate_sensing_csi(const ScenarioGeometry &geom,
                                       const arma::cx_mat &h_tx,
                                       const arma::cx_mat &phis,
                                       const arma::cx_vec &dynamic_gain,
                                       const arma::cx_cube &static_path)
    {
        const int K = geom.row_count;
        const int N = geom.elements_per_row;
        const int M = geom.sense_antennas;
        if (h_tx.n_rows != static_cast<arma::uword>(N) ||
            h_tx.n_cols != static_cast<arma::uword>(K) ||
            phis.n_rows != h_tx.n_rows || phis.n_cols != h_tx.n_cols)
            throw std::invalid_argument("aggregate_sensing_csi: channel/selection shape mismatch");
        if (dynamic_gain.n_elem != static_cast<arma::uword>(K))
            throw std::invalid_argument("aggregate_sensing_csi: dynamic gain must have K entries");
        if (static_path.n_rows != static_cast<arma::uword>(M) ||
            static_path.n_cols != static_cast<arma::uword>(N) ||
            static_path.n_slices != static_cast<arma::uword>(K))
            throw std::invalid_argument("aggregate_sensing_csi: static path must be M x N x K");

        const arma::cx_vec a_rx = steering_vector(geom.theta_sense_aoa, M, geom.element_spacing);
        const arma::cx_vec a_aod = steering_vector(geom.theta_sense_aod, N, geom.element_spacing);

        arma::cx_vec csi(M, arma::fill::zeros);
        for (int k = 0; k < K; ++k)
        {
            const arma::cx_vec reflected = phis.col(k) % h_tx.col(k); // Diag(phi_k) h^T_k
            csi += dynamic_gain(k) * arma::cdot(a_aod, reflected) * a_rx;
            csi += static_path.slice(k) * reflected;
        }
        return csi;
    }

} // namespace rismask
