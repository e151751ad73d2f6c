// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rismask/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rismask/rng.hpp"

namespace rismask
{

    namespace
    {
        using cxd = std::complex<double>;

        double wrap_2pi(double x)
        {
            x = std::fmod(x, 2.0 * M_PI);
            if (x < 0.0)
                x += 2.0 * M_PI;
            return x;
        }

        void check_pair_shapes(const std::vector<BeamVectorPair> &pairs,
                               const RowChannels &rows)
        {
            if (pairs.size() != static_cast<std::size_t>(rows.row_count()))
                throw std::invalid_argument("beamform: pair count must equal row count");
            const arma::uword n = rows.tx.n_rows;
            for (const auto &p : pairs)
                if (p.phi1.n_elem != n || p.phi2.n_elem != n)
                    throw std::invalid_argument("beamform: beam vector length mismatch");
        }

        // Subproblem coefficients with `self` the vector being updated and
        // `other` the fixed one of the pair.
        ElementCoeffs coeffs_for(const arma::cx_vec &h_s, const arma::cx_vec &h_c,
                                 const arma::cx_vec &self, const arma::cx_vec &other,
                                 double varphi, double w1, double w2, int n)
        {
            const cxd rot = std::polar(1.0, -varphi);
            const cxd a = std::conj(h_s(n)); // (h^S_k[n])^H

            const cxd beta1 = arma::cdot(h_s, self) - a * self(n);
            const cxd beta2 = beta1 + arma::cdot(h_s, other);

            ElementCoeffs c;
            c.eta1 = 2.0 * (w1 * std::conj(beta1) - w2 * std::conj(beta2)) * a;
            c.eta3 = rot * std::conj(h_c(n));
            c.beta3 = std::real((arma::cdot(h_c, self) - std::conj(h_c(n)) * self(n)) * rot);
            c.beta4 = std::real(arma::cdot(h_c, other) * rot);
            return c;
        }
    } // namespace

    void OptimizerConfig::validate() const
    {
        if (omega1 < 0.0 || omega2 < 0.0)
            throw std::invalid_argument("OptimizerConfig: weights must be nonnegative");
        if (tolerance <= 0.0)
            throw std::invalid_argument("OptimizerConfig: tolerance must be > 0");
        if (max_iterations < 1)
            throw std::invalid_argument("OptimizerConfig: max_iterations must be >= 1");
        if (onebit && penalty_growth <= 1.0)
            throw std::invalid_argument("OptimizerConfig: penalty_growth must be > 1");
        if (onebit && penalty_rounds < 1)
            throw std::invalid_argument("OptimizerConfig: penalty_rounds must be >= 1");
    }

    double objective(const std::vector<BeamVectorPair> &pairs, double varphi,
                     const RowChannels &rows, const OptimizerConfig &cfg)
    {
        if (cfg.omega1 < 0.0 || cfg.omega2 < 0.0 || cfg.omega3 < 0.0)
            throw std::invalid_argument("objective: weights must be nonnegative");
        check_pair_shapes(pairs, rows);

        const cxd rot = std::polar(1.0, -varphi);
        double obj = 0.0;
        for (int k = 0; k < rows.row_count(); ++k)
        {
            const arma::cx_vec h_s = rows.sense.col(k);
            const arma::cx_vec h_c = rows.comm.col(k);
            const cxd s1 = arma::cdot(h_s, pairs[k].phi1);
            const cxd s2 = arma::cdot(h_s, pairs[k].phi2);
            const double r1 = std::real(arma::cdot(h_c, pairs[k].phi1) * rot);
            const double r2 = std::real(arma::cdot(h_c, pairs[k].phi2) * rot);
            obj += cfg.omega1 * (std::norm(s1) + std::norm(s2)) -
                   cfg.omega2 * std::norm(s1 + s2) + cfg.omega3 * std::min(r1, r2);
        }
        return obj;
    }

    ElementCoeffs element_coeffs_step1(const RowChannels &rows,
                                       const std::vector<BeamVectorPair> &pairs,
                                       double varphi, const OptimizerConfig &cfg,
                                       int k, int n)
    {
        return coeffs_for(rows.sense.col(k), rows.comm.col(k), pairs[k].phi1,
                          pairs[k].phi2, varphi, cfg.omega1, cfg.omega2, n);
    }

    ElementCoeffs element_coeffs_step2(const RowChannels &rows,
                                       const std::vector<BeamVectorPair> &pairs,
                                       double varphi, const OptimizerConfig &cfg,
                                       int k, int n)
    {
        return coeffs_for(rows.sense.col(k), rows.comm.col(k), pairs[k].phi2,
                          pairs[k].phi1, varphi, cfg.omega1, cfg.omega2, n);
    }

    double unit_element_objective(const ElementCoeffs &c, double omega3, cxd x)
    {
        return omega3 * std::min(std::real(c.eta3 * x) + c.beta3, c.beta4) +
               std::real(c.eta1 * x);
    }

    std::complex<double> solve_unit_element(const ElementCoeffs &c, double omega3)
    {
        // Candidate order fixes the tie-break: the two branch-boundary
        // phases, then the two branch-interior stationary points.
        cxd cands[4];
        int count = 0;

        const double a3 = std::abs(c.eta3);
        if (omega3 > 0.0 && a3 > 0.0)
        {
            const double cosv = (c.beta4 - c.beta3) / a3;
            if (cosv >= -1.0 && cosv <= 1.0)
            {
                const double t = std::acos(cosv);
                const double p = std::arg(c.eta3);
                cands[count++] = std::polar(1.0, t - p);
                cands[count++] = std::polar(1.0, -t - p);
            }
        }
        cands[count++] = std::polar(1.0, -std::arg(c.eta1 + omega3 * c.eta3));
        cands[count++] = std::polar(1.0, -std::arg(c.eta1));

        cxd best = cands[0];
        double best_val = unit_element_objective(c, omega3, cands[0]);
        for (int i = 1; i < count; ++i)
        {
            const double v = unit_element_objective(c, omega3, cands[i]);
            if (v > best_val)
            {
                best_val = v;
                best = cands[i];
            }
        }
        return best;
    }

    double real_element_objective(const ElementCoeffs &c, double omega3,
                                  double quad, double x)
    {
        // Value of subproblem (relaxed, real variable) up to the constant
        // -rho absorbed into quad's penalty share.
        return quad * x * x + std::real(c.eta1) * x +
               omega3 * std::min(std::real(c.eta3) * x + c.beta3, c.beta4);
    }

    double solve_real_element(const ElementCoeffs &c, double omega3, double quad)
    {
        double cands[5];
        int count = 0;
        cands[count++] = 1.0;
        cands[count++] = -1.0;

        const double r3 = std::real(c.eta3);
        if (omega3 > 0.0 && r3 != 0.0)
        {
            const double xb = (c.beta4 - c.beta3) / r3;
            if (xb >= -1.0 && xb <= 1.0)
                cands[count++] = xb;
        }
        if (quad < 0.0)
        {
            const double xv1 = -(std::real(c.eta1) + omega3 * r3) / (2.0 * quad);
            if (xv1 >= -1.0 && xv1 <= 1.0)
                cands[count++] = xv1;
            const double xv2 = -std::real(c.eta1) / (2.0 * quad);
            if (xv2 >= -1.0 && xv2 <= 1.0)
                cands[count++] = xv2;
        }

        double best = cands[0];
        double best_val = real_element_objective(c, omega3, quad, cands[0]);
        for (int i = 1; i < count; ++i)
        {
            const double v = real_element_objective(c, omega3, quad, cands[i]);
            if (v > best_val)
            {
                best_val = v;
                best = cands[i];
            }
        }
        return best;
    }

    double varphi_update(const std::vector<BeamVectorPair> &pairs,
                         const RowChannels &rows)
    {
        check_pair_shapes(pairs, rows);
        const int K = rows.row_count();

        std::vector<cxd> c1(K), c2(K);
        for (int k = 0; k < K; ++k)
        {
            c1[k] = arma::cdot(rows.comm.col(k), pairs[k].phi1);
            c2[k] = arma::cdot(rows.comm.col(k), pairs[k].phi2);
        }

        auto value = [&](double phi) {
            const cxd rot = std::polar(1.0, -phi);
            double v = 0.0;
            for (int k = 0; k < K; ++k)
                v += std::min(std::real(c1[k] * rot), std::real(c2[k] * rot));
            return v;
        };

        // Switching points where Re{(c1 - c2) e^{-j phi}} changes sign:
        // phi = angle(c1 - c2) + pi/2 + i*pi, restricted to [0, 2pi).
        std::vector<double> bps;
        for (int k = 0; k < K; ++k)
        {
            const cxd d = c1[k] - c2[k];
            if (std::abs(d) == 0.0)
                continue;
            const double base = std::arg(d) + M_PI / 2.0;
            bps.push_back(wrap_2pi(base));
            bps.push_back(wrap_2pi(base + M_PI));
        }
        std::sort(bps.begin(), bps.end());
        std::vector<double> uniq;
        for (double b : bps)
            if (uniq.empty() || b - uniq.back() > 1e-12)
                uniq.push_back(b);
        if (uniq.size() > 1 && (uniq.front() + 2.0 * M_PI) - uniq.back() <= 1e-12)
            uniq.pop_back();

        std::vector<double> cands = uniq;
        const std::size_t nb = uniq.size();
        const std::size_t n_intervals = nb == 0 ? 1 : nb;
        for (std::size_t i = 0; i < n_intervals; ++i)
        {
            double lo, hi;
            if (nb == 0)
            {
                lo = 0.0;
                hi = 2.0 * M_PI;
            }
            else
            {
                lo = uniq[i];
                hi = (i + 1 < nb) ? uniq[i + 1] : uniq[0] + 2.0 * M_PI;
            }
            const double mid = 0.5 * (lo + hi);
            const cxd rot = std::polar(1.0, -mid);
            cxd sum = 0.0;
            for (int k = 0; k < K; ++k)
                sum += (std::real(c1[k] * rot) <= std::real(c2[k] * rot)) ? c1[k] : c2[k];
            if (std::abs(sum) > 0.0)
                cands.push_back(wrap_2pi(std::arg(sum)));
        }
        if (cands.empty())
            return 0.0;

        double best = cands[0];
        double best_val = value(cands[0]);
        for (std::size_t i = 1; i < cands.size(); ++i)
        {
            const double v = value(cands[i]);
            if (v > best_val)
            {
                best_val = v;
                best = cands[i];
            }
        }
        return best;
    }

    // Regression-pinned multipliers applied on top of the balance estimate
    // when the config leaves omega3 unset. The 1-bit relaxation collapses the
    // pair onto a single vector when the comm pull is as strong as in the
    // continuous mode, so it runs with a smaller share.
    static constexpr double k_default_comm_weight = 32.0;
    static constexpr double k_default_onebit_comm_weight = 4.0;

    double auto_omega3(const RowChannels &rows, double omega1)
    {
        double sense_sq = 0.0;
        double comm_mag = 0.0;
        for (int k = 0; k < rows.row_count(); ++k)
        {
            sense_sq += std::real(arma::cdot(rows.sense.col(k), rows.sense.col(k)));
            comm_mag += arma::norm(rows.comm.col(k));
        }
        if (comm_mag <= 0.0)
            return 0.0;
        return omega1 * 2.0 * sense_sq / comm_mag;
    }

    namespace
    {
        // Sensing-aligned pair with a seeded phase dither. An exactly
        // antisymmetric start (phi2 = -phi1) is a stationary point of the
        // block cycle: every min branch sits at zero and no single-element
        // move can pass the cap, so the dither is required to ascend.
        std::vector<BeamVectorPair> aligned_init(const RowChannels &rows, bool binary,
                                                 std::uint64_t seed)
        {
            Rng rng(Rng::derive_seed(seed, 0x1b17));
            const double dither = 0.5;
            const int K = rows.row_count();
            const int N = rows.elements_per_row();
            std::vector<BeamVectorPair> pairs(K);
            for (int k = 0; k < K; ++k)
            {
                pairs[k].phi1.set_size(N);
                pairs[k].phi2.set_size(N);
                for (int n = 0; n < N; ++n)
                {
                    const double ph = std::arg(rows.sense(n, k));
                    const double p1 = ph + dither * (rng.uniform() - 0.5);
                    const double p2 = ph + M_PI + dither * (rng.uniform() - 0.5);
                    if (binary)
                    {
                        pairs[k].phi1(n) = std::cos(p1) >= 0.0 ? 1.0 : -1.0;
                        pairs[k].phi2(n) = std::cos(p2) >= 0.0 ? 1.0 : -1.0;
                    }
                    else
                    {
                        pairs[k].phi1(n) = std::polar(1.0, p1);
                        pairs[k].phi2(n) = std::polar(1.0, p2);
                    }
                }
            }
            return pairs;
        }

        void check_rows_finite(const RowChannels &rows)
        {
            if (!rows.tx.is_finite() || !rows.comm.is_finite() || !rows.sense.is_finite())
                throw std::invalid_argument("beamform: channel entries must be finite");
        }
    } // namespace

    namespace
    {
        OptimizerResult bcd_optimize_single(const RowChannels &rows,
                                            const OptimizerConfig &cfg,
                                            const std::vector<BeamVectorPair> *init);
        OptimizerResult onebit_optimize_single(const RowChannels &rows,
                                               const OptimizerConfig &cfg);
    } // namespace

    OptimizerResult bcd_optimize(const RowChannels &rows, const OptimizerConfig &cfg,
                                 const std::vector<BeamVectorPair> *init)
    {
        if (init || cfg.restarts <= 1)
            return bcd_optimize_single(rows, cfg, init);
        OptimizerResult best;
        double best_obj = -arma::datum::inf;
        for (int s = 0; s < cfg.restarts; ++s)
        {
            OptimizerConfig c = cfg;
            c.rng_seed = Rng::derive_seed(cfg.rng_seed, 0x100 + static_cast<std::uint64_t>(s));
            OptimizerResult r = bcd_optimize_single(rows, c, nullptr);
            if (r.objective_trace.back() > best_obj)
            {
                best_obj = r.objective_trace.back();
                best = std::move(r);
            }
        }
        return best;
    }

    OptimizerResult onebit_optimize(const RowChannels &rows, const OptimizerConfig &cfg)
    {
        if (cfg.restarts <= 1)
            return onebit_optimize_single(rows, cfg);
        OptimizerResult best;
        double best_obj = -arma::datum::inf;
        for (int s = 0; s < cfg.restarts; ++s)
        {
            OptimizerConfig c = cfg;
            c.rng_seed = Rng::derive_seed(cfg.rng_seed, 0x200 + static_cast<std::uint64_t>(s));
            OptimizerResult r = onebit_optimize_single(rows, c);
            if (r.objective_trace.back() > best_obj)
            {
                best_obj = r.objective_trace.back();
                best = std::move(r);
            }
        }
        return best;
    }

    namespace
    {
    OptimizerResult bcd_optimize_single(const RowChannels &rows,
                                        const OptimizerConfig &cfg,
                                        const std::vector<BeamVectorPair> *init)
    {
        cfg.validate();
        if (cfg.onebit)
            throw std::invalid_argument("bcd_optimize: config requests onebit mode");
        check_rows_finite(rows);

        OptimizerConfig eff = cfg;
        if (eff.omega3 <= 0.0)
            eff.omega3 = k_default_comm_weight * auto_omega3(rows, eff.omega1);

        OptimizerResult res;
        res.pairs = init ? *init : aligned_init(rows, false, cfg.rng_seed);
        check_pair_shapes(res.pairs, rows);
        res.varphi = varphi_update(res.pairs, rows);

        const int K = rows.row_count();
        const int N = rows.elements_per_row();
        double prev = objective(res.pairs, res.varphi, rows, eff);

        for (int l = 1; l <= eff.max_iterations; ++l)
        {
            for (int k = 0; k < K; ++k)
                for (int n = 0; n < N; ++n)
                    res.pairs[k].phi1(n) = solve_unit_element(
                        element_coeffs_step1(rows, res.pairs, res.varphi, eff, k, n),
                        eff.omega3);
            for (int k = 0; k < K; ++k)
                for (int n = 0; n < N; ++n)
                    res.pairs[k].phi2(n) = solve_unit_element(
                        element_coeffs_step2(rows, res.pairs, res.varphi, eff, k, n),
                        eff.omega3);
            res.varphi = varphi_update(res.pairs, rows);

            const double obj = objective(res.pairs, res.varphi, rows, eff);
            res.objective_trace.push_back(obj);
            res.iterations = l;
            if (std::abs(obj - prev) < eff.tolerance)
            {
                res.converged = true;
                break;
            }
            prev = obj;
        }
        return res;
    }

    OptimizerResult onebit_optimize_single(const RowChannels &rows,
                                            const OptimizerConfig &cfg)
    {
        cfg.validate();
        if (!cfg.onebit)
            throw std::invalid_argument("onebit_optimize: config requests continuous mode");
        check_rows_finite(rows);

        OptimizerConfig eff = cfg;
        if (eff.omega3 <= 0.0)
            eff.omega3 = k_default_onebit_comm_weight * auto_omega3(rows, eff.omega1);

        const int K = rows.row_count();
        const int N = rows.elements_per_row();

        double rho = eff.penalty_init;
        if (rho <= 0.0)
        {
            double mean_sq = 0.0;
            for (int k = 0; k < K; ++k)
                mean_sq += std::real(arma::cdot(rows.sense.col(k), rows.sense.col(k)));
            mean_sq /= static_cast<double>(K) * N;
            rho = 0.1 * mean_sq;
        }

        OptimizerResult res;
        res.pairs = aligned_init(rows, true, cfg.rng_seed);
        res.varphi = varphi_update(res.pairs, rows);

        auto penalty = [&](const std::vector<BeamVectorPair> &pairs, double r) {
            double p = 0.0;
            for (const auto &pr : pairs)
            {
                for (const cxd v : pr.phi1)
                    p += r * (std::real(v) * std::real(v) - 1.0);
                for (const cxd v : pr.phi2)
                    p += r * (std::real(v) * std::real(v) - 1.0);
            }
            return p;
        };

        for (int round = 0; round < eff.penalty_rounds; ++round)
        {
            double prev = objective(res.pairs, res.varphi, rows, eff) +
                          penalty(res.pairs, rho);
            res.converged = false;
            for (int l = 1; l <= eff.max_iterations; ++l)
            {
                for (int k = 0; k < K; ++k)
                    for (int n = 0; n < N; ++n)
                    {
                        const double quad =
                            (eff.omega1 - eff.omega2) * std::norm(rows.sense(n, k)) + rho;
                        res.pairs[k].phi1(n) = solve_real_element(
                            element_coeffs_step1(rows, res.pairs, res.varphi, eff, k, n),
                            eff.omega3, quad);
                    }
                for (int k = 0; k < K; ++k)
                    for (int n = 0; n < N; ++n)
                    {
                        const double quad =
                            (eff.omega1 - eff.omega2) * std::norm(rows.sense(n, k)) + rho;
                        res.pairs[k].phi2(n) = solve_real_element(
                            element_coeffs_step2(rows, res.pairs, res.varphi, eff, k, n),
                            eff.omega3, quad);
                    }
                res.varphi = varphi_update(res.pairs, rows);

                const double unpen = objective(res.pairs, res.varphi, rows, eff);
                const double pen = unpen + penalty(res.pairs, rho);
                res.objective_trace.push_back(unpen);
                ++res.iterations;
                if (std::abs(pen - prev) < eff.tolerance)
                {
                    res.converged = true;
                    break;
                }
                prev = pen;
            }
            rho *= eff.penalty_growth;
        }

        // Round to exact +-1, zero mapped to +1.
        for (auto &pr : res.pairs)
        {
            for (cxd &v : pr.phi1)
                v = std::real(v) >= 0.0 ? 1.0 : -1.0;
            for (cxd &v : pr.phi2)
                v = std::real(v) >= 0.0 ? 1.0 : -1.0;
        }
        res.varphi = varphi_update(res.pairs, rows);

        // Greedy sign polish on the unpenalized objective; each accepted flip
        // strictly ascends, so the sweep terminates.
        auto flip_value = [&](const ElementCoeffs &c, int k, int n, double x) {
            const double quad = (eff.omega1 - eff.omega2) * std::norm(rows.sense(n, k));
            return real_element_objective(c, eff.omega3, quad, x);
        };
        for (int sweep = 0; sweep < 32; ++sweep)
        {
            bool changed = false;
            for (int k = 0; k < K; ++k)
                for (int n = 0; n < N; ++n)
                {
                    const ElementCoeffs c1 =
                        element_coeffs_step1(rows, res.pairs, res.varphi, eff, k, n);
                    const double keep1 = std::real(res.pairs[k].phi1(n));
                    const double best1 =
                        flip_value(c1, k, n, 1.0) >= flip_value(c1, k, n, -1.0) ? 1.0 : -1.0;
                    if (flip_value(c1, k, n, best1) > flip_value(c1, k, n, keep1))
                    {
                        res.pairs[k].phi1(n) = best1;
                        changed = true;
                    }
                    const ElementCoeffs c2 =
                        element_coeffs_step2(rows, res.pairs, res.varphi, eff, k, n);
                    const double keep2 = std::real(res.pairs[k].phi2(n));
                    const double best2 =
                        flip_value(c2, k, n, 1.0) >= flip_value(c2, k, n, -1.0) ? 1.0 : -1.0;
                    if (flip_value(c2, k, n, best2) > flip_value(c2, k, n, keep2))
                    {
                        res.pairs[k].phi2(n) = best2;
                        changed = true;
                    }
                }
            res.varphi = varphi_update(res.pairs, rows);
            if (!changed)
                break;
        }
        res.objective_trace.push_back(objective(res.pairs, res.varphi, rows, eff));
        return res;
    }
    } // namespace

    std::vector<BeampatternPoint> beampattern(const BeamVectorPair &pair,
                                              const arma::cx_vec &h_tx_row,
                                              double element_spacing,
                                              const arma::vec &angles_rad)
    {
        if (pair.phi1.n_elem != h_tx_row.n_elem || pair.phi2.n_elem != h_tx_row.n_elem)
            throw std::invalid_argument("beampattern: shape mismatch");

        const int N = static_cast<int>(h_tx_row.n_elem);
        std::vector<BeampatternPoint> out;
        out.reserve(angles_rad.n_elem);
        for (const double ang : angles_rad)
        {
            const arma::cx_vec a = steering_vector(ang, N, element_spacing);
            const cxd r1 = arma::cdot(a, h_tx_row % pair.phi1);
            const cxd r2 = arma::cdot(a, h_tx_row % pair.phi2);
            BeampatternPoint p;
            p.angle_rad = ang;
            p.mag1 = std::abs(r1);
            p.mag2 = std::abs(r2);
            p.phase_diff_rad = std::arg(r1 * std::conj(r2));
            out.push_back(p);
        }
        return out;
    }

    arma::cx_mat select_phis(const std::vector<BeamVectorPair> &pairs,
                             const std::vector<std::uint8_t> &selection)
    {
        if (selection.size() != pairs.size())
            throw std::invalid_argument("select_phis: selection length mismatch");
        const arma::uword N = pairs.empty() ? 0 : pairs[0].phi1.n_elem;
        arma::cx_mat phis(N, pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k)
            phis.col(k) = selection[k] ? pairs[k].phi2 : pairs[k].phi1;
        return phis;
    }

    std::pair<double, double> comm_snr_extremes(const RowChannels &rows,
                                                const std::vector<BeamVectorPair> &pairs,
                                                double tx_power, double noise_power,
                                                int comm_antennas)
    {
        check_pair_shapes(pairs, rows);
        const int K = rows.row_count();
        if (K > 24)
            throw std::invalid_argument("comm_snr_extremes: enumeration limited to K <= 24");
        if (noise_power <= 0.0)
            throw std::invalid_argument("comm_snr_extremes: noise power must be > 0");

        std::vector<cxd> c1(K), c2(K);
        for (int k = 0; k < K; ++k)
        {
            c1[k] = arma::cdot(rows.comm.col(k), pairs[k].phi1);
            c2[k] = arma::cdot(rows.comm.col(k), pairs[k].phi2);
        }

        double lo = arma::datum::inf;
        double hi = 0.0;
        const std::uint32_t combos = 1u << K;
        for (std::uint32_t mask = 0; mask < combos; ++mask)
        {
            cxd sum = 0.0;
            for (int k = 0; k < K; ++k)
                sum += (mask >> k) & 1u ? c2[k] : c1[k];
            const double snr = comm_antennas * std::norm(sum) * tx_power / noise_power;
            lo = std::min(lo, snr);
            hi = std::max(hi, snr);
        }
        return {lo, hi};
    }

} // namespace rismask
