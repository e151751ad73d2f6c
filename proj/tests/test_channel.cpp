// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch_amalgamated.hpp>

#include "rismask/channel.hpp"
#include "rismask/rng.hpp"

using namespace rismask;
using cxd = std::complex<double>;

namespace
{
    // Dense-matrix reference for the effective channels, built from explicit
    // Diag products rather than the elementwise shortcut.
    arma::cx_vec dense_comm_channel(double a_c, const arma::cx_vec &alpha_aod,
                                    const arma::cx_vec &h_tx)
    {
        arma::cx_mat row = a_c * (alpha_aod.t() * arma::diagmat(h_tx));
        return row.t();
    }

    RowChannels random_rows(int K, int N, Rng &rng)
    {
        RowChannels rows;
        rows.tx.set_size(N, K);
        rows.comm.set_size(N, K);
        rows.sense.set_size(N, K);
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < N; ++n)
            {
                rows.tx(n, k) = rng.cnormal();
                rows.comm(n, k) = rng.cnormal();
                rows.sense(n, k) = rng.cnormal();
            }
        return rows;
    }

    arma::cx_mat random_unit_phis(int K, int N, Rng &rng)
    {
        arma::cx_mat phis(N, K);
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < N; ++n)
                phis(n, k) = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
        return phis;
    }
} // namespace

TEST_CASE("steering vector - boresight and 30 degrees")
{
    const arma::cx_vec a0 = steering_vector(0.0, 4, 0.5);
    for (const cxd v : a0)
        CHECK(std::abs(v - cxd(1.0, 0.0)) < 1e-15);

    // sin(pi/6) = 0.5 forces a phase step of pi/2
    const arma::cx_vec a30 = steering_vector(M_PI / 6.0, 2, 0.5);
    CHECK(std::abs(a30(0) - cxd(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(a30(1) - cxd(0.0, 1.0)) < 1e-12);
}

TEST_CASE("steering vector - matches per-element scalar evaluation")
{
    const double angle = 50.0 * M_PI / 180.0;
    const arma::cx_vec a = steering_vector(angle, 3, 0.5);
    for (int m = 0; m < 3; ++m)
    {
        const cxd expect = std::exp(cxd(0.0, 2.0 * M_PI * 0.5 * m * std::sin(angle)));
        CHECK(std::abs(a(m) - expect) < 1e-12);
    }
}

TEST_CASE("steering vector - unit modulus and argument checks")
{
    Rng rng(7);
    for (int i = 0; i < 50; ++i)
    {
        const double angle = rng.uniform(-M_PI / 2 + 1e-3, M_PI / 2 - 1e-3);
        const arma::cx_vec a = steering_vector(angle, 8, 0.5);
        for (const cxd v : a)
            CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(steering_vector(std::nan(""), 4, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector(0.0, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector(M_PI / 2.0, 4, 0.5), std::invalid_argument);
}

TEST_CASE("tx-ris channel - free space amplitude and phase")
{
    ScenarioGeometry g = make_grid_geometry(1, 2, 5.22e9, 0.5, 1.0);
    const double lambda = g.wavelength();

    // Two elements at distances d and 2d: amplitude ratio exactly 2.
    g.element_positions(0, 0) = 0.0;
    g.element_positions(1, 0) = 0.0;
    g.element_positions(2, 0) = 0.75;
    g.element_positions(0, 1) = 0.0;
    g.element_positions(1, 1) = 0.0;
    g.element_positions(2, 1) = 0.5;
    arma::cx_mat h = tx_ris_channel(g);
    CHECK(std::abs(h(0, 0)) / std::abs(h(1, 0)) == Catch::Approx(2.0).epsilon(1e-12));

    // Element one wavelength away: phase is 0 mod 2pi.
    g.element_positions(2, 0) = 1.0 - lambda;
    h = tx_ris_channel(g);
    CHECK(std::abs(std::remainder(std::arg(h(0, 0)), 2.0 * M_PI)) < 1e-9);
}

TEST_CASE("tx-ris channel - grid matches per-element scalar oracle")
{
    const ScenarioGeometry g = make_grid_geometry(8, 16, 5.22e9, 0.5, 1.0);
    const double lambda = g.wavelength();
    const arma::cx_mat h = tx_ris_channel(g);
    REQUIRE(h.n_rows == 16);
    REQUIRE(h.n_cols == 8);
    for (int k = 0; k < 8; ++k)
        for (int n = 0; n < 16; ++n)
        {
            const double d = arma::norm(g.element_position(k, n) - g.tx_position);
            const cxd expect = (lambda / (4.0 * M_PI * d)) *
                               std::exp(cxd(0.0, -2.0 * M_PI * d / lambda));
            CHECK(std::abs(h(n, k) - expect) < 1e-12 * std::abs(expect) + 1e-18);
        }
}

TEST_CASE("tx-ris channel - degenerate geometry is rejected")
{
    ScenarioGeometry g = make_grid_geometry(1, 1);
    g.element_positions.col(0) = g.tx_position;
    CHECK_THROWS_AS(tx_ris_channel(g), std::invalid_argument);
}

TEST_CASE("effective channels - identities and linearity in pathloss")
{
    ScenarioGeometry g = make_grid_geometry(1, 1);
    g.theta_comm_aod = 0.0;
    g.theta_sense_aod = 0.0;
    arma::cx_mat h_tx(1, 1);
    h_tx(0, 0) = 1.0;

    RowChannels rows = effective_channels(g, h_tx);
    CHECK(std::abs(rows.comm(0, 0) - cxd(1.0, 0.0)) < 1e-15);

    g.pathloss_comm(0) = 2.0;
    RowChannels rows2 = effective_channels(g, h_tx);
    CHECK(std::abs(rows2.comm(0, 0) - 2.0 * rows.comm(0, 0)) < 1e-15);
    CHECK(std::abs(rows2.sense(0, 0) - rows.sense(0, 0)) < 1e-15);
}

TEST_CASE("effective channels - dense matrix oracle")
{
    ScenarioGeometry g = make_grid_geometry(2, 4);
    g.theta_comm_aod = -0.35;
    g.theta_sense_aod = 0.9;
    g.pathloss_comm = {0.8, 1.3};

    Rng rng(11);
    arma::cx_mat h_tx(4, 2);
    for (auto &v : h_tx)
        v = rng.cnormal();

    const RowChannels rows = effective_channels(g, h_tx);
    const arma::cx_vec a_c = steering_vector(g.theta_comm_aod, 4, 0.5);
    const arma::cx_vec a_s = steering_vector(g.theta_sense_aod, 4, 0.5);
    for (int k = 0; k < 2; ++k)
    {
        const arma::cx_vec oc = dense_comm_channel(g.pathloss_comm(k), a_c, h_tx.col(k));
        const arma::cx_vec os = dense_comm_channel(1.0, a_s, h_tx.col(k));
        CHECK(arma::norm(rows.comm.col(k) - oc) < 1e-12 * arma::norm(oc));
        CHECK(arma::norm(rows.sense.col(k) - os) < 1e-12 * arma::norm(os));
    }
}

TEST_CASE("comm snr - unit channel and error path")
{
    RowChannels rows;
    rows.tx = arma::cx_mat(1, 1, arma::fill::ones);
    rows.comm = arma::cx_mat(1, 1, arma::fill::ones);
    rows.sense = arma::cx_mat(1, 1, arma::fill::ones);
    arma::cx_mat phi(1, 1, arma::fill::ones);

    CHECK(comm_snr(rows, phi, 1.0, 1.0, 3) == Catch::Approx(3.0));
    CHECK_THROWS_AS(comm_snr(rows, phi, 1.0, 0.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(comm_snr(rows, phi, 1.0, -1.0, 3), std::invalid_argument);
}

TEST_CASE("comm snr - global phase invariance and direct oracle")
{
    Rng rng(23);
    const RowChannels rows = random_rows(4, 8, rng);
    const arma::cx_mat phis = random_unit_phis(4, 8, rng);

    const double snr = comm_snr(rows, phis, 2.0, 0.5, 3);

    // Direct summation oracle.
    cxd sum = 0.0;
    for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 8; ++n)
            sum += std::conj(rows.comm(n, k)) * phis(n, k);
    const double oracle = 3 * std::norm(sum) * 2.0 / 0.5;
    CHECK(snr == Catch::Approx(oracle).epsilon(1e-10));

    const cxd rot = std::polar(1.0, 1.234);
    const double snr_rot = comm_snr(rows, arma::cx_mat(rot * phis), 2.0, 0.5, 3);
    CHECK(snr_rot == Catch::Approx(snr).epsilon(1e-10));
}

TEST_CASE("sensing power - alignment optimum and direct oracle")
{
    arma::cx_vec h(1);
    h(0) = 1.0;
    arma::cx_vec phi(1);
    phi(0) = 1.0;
    CHECK(sensing_power(h, phi, 2.0) == Catch::Approx(2.0));

    Rng rng(31);
    arma::cx_vec hs(16);
    for (auto &v : hs)
        v = rng.cnormal();

    // Phase alignment maximizes the coherent sum.
    arma::cx_vec aligned(16);
    for (int n = 0; n < 16; ++n)
        aligned(n) = std::polar(1.0, std::arg(hs(n)));
    double mag_sum = 0.0;
    for (const cxd v : hs)
        mag_sum += std::abs(v);
    CHECK(sensing_power(hs, aligned, 1.5) ==
          Catch::Approx(mag_sum * mag_sum * 1.5).epsilon(1e-10));

    const arma::cx_vec phir = random_unit_phis(1, 16, rng).col(0);
    cxd dot = 0.0;
    for (int n = 0; n < 16; ++n)
        dot += std::conj(hs(n)) * phir(n);
    CHECK(sensing_power(hs, phir, 1.5) == Catch::Approx(std::norm(dot) * 1.5).epsilon(1e-10));

    const cxd rot = std::polar(1.0, -2.2);
    CHECK(sensing_power(hs, arma::cx_vec(rot * phir), 1.5) ==
          Catch::Approx(sensing_power(hs, phir, 1.5)).epsilon(1e-10));
}

TEST_CASE("aggregate sensing csi - zero inputs, determinism, dense oracle")
{
    ScenarioGeometry g = make_grid_geometry(2, 4);
    g.theta_sense_aoa = 0.6;
    g.theta_sense_aod = 0.9;
    const arma::cx_mat h_tx = tx_ris_channel(g);

    Rng rng(47);
    const arma::cx_mat phis = random_unit_phis(2, 4, rng);

    arma::cx_vec dyn_zero(2, arma::fill::zeros);
    arma::cx_cube stat_zero(3, 4, 2, arma::fill::zeros);
    const arma::cx_vec zero = aggregate_sensing_csi(g, h_tx, phis, dyn_zero, stat_zero);
    CHECK(arma::norm(zero) == 0.0);

    arma::cx_cube stat(3, 4, 2);
    for (auto &v : stat)
        v = rng.cnormal();
    const arma::cx_vec s1 = aggregate_sensing_csi(g, h_tx, phis, dyn_zero, stat);
    const arma::cx_vec s2 = aggregate_sensing_csi(g, h_tx, phis, dyn_zero, stat);
    CHECK(arma::norm(s1 - s2) == 0.0);

    arma::cx_vec dyn(2);
    dyn(0) = rng.cnormal();
    dyn(1) = rng.cnormal();
    const arma::cx_vec got = aggregate_sensing_csi(g, h_tx, phis, dyn, stat);

    // Dense oracle: explicit G matrices and Diag products.
    const arma::cx_vec a_rx = steering_vector(g.theta_sense_aoa, 3, 0.5);
    const arma::cx_vec a_aod = steering_vector(g.theta_sense_aod, 4, 0.5);
    arma::cx_vec oracle(3, arma::fill::zeros);
    for (int k = 0; k < 2; ++k)
    {
        const arma::cx_mat g_ss = dyn(k) * a_rx * a_aod.t();
        oracle += (g_ss + stat.slice(k)) * arma::diagmat(phis.col(k)) * h_tx.col(k);
    }
    CHECK(arma::norm(got - oracle) < 1e-10 * arma::norm(oracle));
}

TEST_CASE("aggregate sensing csi - additive in static path, homogeneous in dynamic gain")
{
    ScenarioGeometry g = make_grid_geometry(3, 5);
    g.theta_sense_aoa = -0.4;
    g.theta_sense_aod = 0.7;
    const arma::cx_mat h_tx = tx_ris_channel(g);

    Rng rng(53);
    const arma::cx_mat phis = random_unit_phis(3, 5, rng);
    arma::cx_vec dyn(3);
    for (auto &v : dyn)
        v = rng.cnormal();
    arma::cx_cube sa(3, 5, 3), sb(3, 5, 3);
    for (auto &v : sa)
        v = rng.cnormal();
    for (auto &v : sb)
        v = rng.cnormal();

    const arma::cx_vec both = aggregate_sensing_csi(g, h_tx, phis, dyn, sa + sb);
    const arma::cx_vec lhs = aggregate_sensing_csi(g, h_tx, phis, dyn, sa);
    const arma::cx_vec zero_dyn = aggregate_sensing_csi(
        g, h_tx, phis, arma::cx_vec(3, arma::fill::zeros), sb);
    CHECK(arma::norm(both - lhs - zero_dyn) < 1e-10 * arma::norm(both));

    const cxd scale(1.7, -0.4);
    arma::cx_cube stat_zero(3, 5, 3, arma::fill::zeros);
    const arma::cx_vec base = aggregate_sensing_csi(g, h_tx, phis, dyn, stat_zero);
    const arma::cx_vec scaled =
        aggregate_sensing_csi(g, h_tx, phis, arma::cx_vec(scale * dyn), stat_zero);
    CHECK(arma::norm(scaled - scale * base) < 1e-10 * arma::norm(scaled));
}

TEST_CASE("channel closed forms - random small instances against dense oracles")
{
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial)
    {
        const int K = 1 + static_cast<int>(rng.uniform_index(4));
        const int N = 1 + static_cast<int>(rng.uniform_index(8));
        const RowChannels rows = random_rows(K, N, rng);
        const arma::cx_mat phis = random_unit_phis(K, N, rng);

        cxd sum = 0.0;
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < N; ++n)
                sum += std::conj(rows.comm(n, k)) * phis(n, k);
        const double oracle_snr = 2 * std::norm(sum) * 1.3 / 0.7;
        CHECK(comm_snr(rows, phis, 1.3, 0.7, 2) ==
              Catch::Approx(oracle_snr).epsilon(1e-10).margin(1e-12));

        cxd dot = 0.0;
        for (int n = 0; n < N; ++n)
            dot += std::conj(rows.sense(n, 0)) * phis(n, 0);
        CHECK(sensing_power(rows.sense.col(0), phis.col(0), 0.9) ==
              Catch::Approx(std::norm(dot) * 0.9).epsilon(1e-10).margin(1e-12));
    }
}
