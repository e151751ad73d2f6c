// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_beamform_H
#define rismask_beamform_H

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "rismask/channel.hpp"

namespace rismask
{

    // The two per-row reflection profiles the masking scheme switches between.
    // Continuous mode: unit-modulus entries. 1-bit mode: entries in {-1, +1}.
    struct BeamVectorPair
    {
        arma::cx_vec phi1;
        arma::cx_vec phi2;
    };

    struct OptimizerConfig
    {
        double omega1 = 1.0; // sensing-gain weight
        double omega2 = 1.0; // pair-cancellation weight
        double omega3 = 0.0; // comm-alignment weight; <= 0 scales from the channels
        double tolerance = 1e-4;
        int max_iterations = 100;
        std::uint64_t rng_seed = 1;

        bool onebit = false;
        double penalty_init = 0.0; // <= 0 scales from mean |h^S|^2
        double penalty_growth = 5.0;
        int penalty_rounds = 6;

        // Independent dithered starts; the run with the best final objective
        // wins. Ignored when an explicit initial point is supplied.
        int restarts = 8;

        void validate() const;
    };

    struct OptimizerResult
    {
        std::vector<BeamVectorPair> pairs;
        double varphi = 0.0; // aggregate comm-signal phase
        std::vector<double> objective_trace;
        bool converged = false;
        int iterations = 0;
    };

    // Scalar subproblem coefficients for one reflecting element: maximize
    //   omega3 * min(Re{eta3 x} + beta3, beta4) + Re{eta1 x}
    // over |x| = 1 (continuous) or x in [-1, 1] (1-bit relaxation, where the
    // quadratic term quad * x^2 is added).
    struct ElementCoeffs
    {
        std::complex<double> eta1{0.0, 0.0};
        std::complex<double> eta3{0.0, 0.0};
        double beta3 = 0.0;
        double beta4 = 0.0;
    };

    // Full objective of the joint design problem at the given point.
    double objective(const std::vector<BeamVectorPair> &pairs, double varphi,
                     const RowChannels &rows, const OptimizerConfig &cfg);

    // Subproblem coefficients when updating phi_{k,1}[n] (step 1) or
    // phi_{k,2}[n] (step 2) with everything else fixed.
    ElementCoeffs element_coeffs_step1(const RowChannels &rows,
                                       const std::vector<BeamVectorPair> &pairs,
                                       double varphi, const OptimizerConfig &cfg,
                                       int k, int n);
    ElementCoeffs element_coeffs_step2(const RowChannels &rows,
                                       const std::vector<BeamVectorPair> &pairs,
                                       double varphi, const OptimizerConfig &cfg,
                                       int k, int n);

    // Value of the scalar subproblem at a candidate point.
    double unit_element_objective(const ElementCoeffs &c, double omega3,
                                  std::complex<double> x);
    double real_element_objective(const ElementCoeffs &c, double omega3,
                                  double quad, double x);

    // Exact maximizer of the unit-modulus scalar subproblem: evaluates the
    // boundary phases where the two min branches meet plus the two
    // branch-interior stationary points and keeps the best.
    std::complex<double> solve_unit_element(const ElementCoeffs &c, double omega3);

    // Exact maximizer over [-1, 1] of the piecewise-quadratic relaxation.
    double solve_real_element(const ElementCoeffs &c, double omega3, double quad);

    // Step 3: best aggregate-signal phase given fixed pairs. Enumerates the
    // min-branch switching points and the per-branch closed-form optima.
    double varphi_update(const std::vector<BeamVectorPair> &pairs,
                         const RowChannels &rows);

    // Block-coordinate ascent, continuous unit-modulus mode.
    OptimizerResult bcd_optimize(const RowChannels &rows, const OptimizerConfig &cfg,
                                 const std::vector<BeamVectorPair> *init = nullptr);

    // Relaxation-and-penalty variant for 1-bit hardware; output entries are
    // exactly +-1 and the reported objective is the unpenalized value of the
    // rounded solution.
    OptimizerResult onebit_optimize(const RowChannels &rows, const OptimizerConfig &cfg);

    struct BeampatternPoint
    {
        double angle_rad = 0.0;
        double mag1 = 0.0;
        double mag2 = 0.0;
        double phase_diff_rad = 0.0; // angle of (response1 / response2)
    };

    // Row response |alpha^H(theta) Diag(h^T) phi_i| and the phase difference
    // between the two vectors, over an angle grid inside (-pi/2, pi/2).
    std::vector<BeampatternPoint> beampattern(const BeamVectorPair &pair,
                                              const arma::cx_vec &h_tx_row,
                                              double element_spacing,
                                              const arma::vec &angles_rad);

    // Per-row selection applied to the pairs: column k is phi1 or phi2 of
    // row k according to bit k.
    arma::cx_mat select_phis(const std::vector<BeamVectorPair> &pairs,
                             const std::vector<std::uint8_t> &selection);

    // Exhaustive min/max of comm_snr over all 2^K per-row selections.
    std::pair<double, double> comm_snr_extremes(const RowChannels &rows,
                                                const std::vector<BeamVectorPair> &pairs,
                                                double tx_power, double noise_power,
                                                int comm_antennas);

    // Default omega3 used when the config leaves it unset: makes the comm
    // term and the sensing terms comparable in magnitude.
    double auto_omega3(const RowChannels &rows, double omega1);

} // namespace rismask

#endif
