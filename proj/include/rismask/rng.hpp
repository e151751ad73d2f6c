// SPDX-License-Identifier: Apache-2.0
//
// rismask: privacy-preserving RIS-assisted ISAC simulator and beamforming toolkit
// Copyright (C) 2026 The rismask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef rismask_rng_H
#define rismask_rng_H

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace rismask
{

    // Deterministic random source. All sampling goes through explicit
    // transformations of the raw 64-bit stream so that replay with the same
    // seed is bit-exact independent of the standard library's distribution
    // implementations.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : gen_(seed) {}

        std::uint64_t raw() { return gen_(); }

        // Uniform in [0, 1), 53-bit resolution.
        double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // Uniform integer in [0, n), n >= 1. Rejection sampling keeps the
        // draw unbiased.
        std::uint64_t uniform_index(std::uint64_t n)
        {
            if (n <= 1)
                return 0;
            const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
            std::uint64_t x = raw();
            while (x >= limit)
                x = raw();
            return x % n;
        }

        // Standard normal via Box-Muller; one spare value is cached.
        double normal()
        {
            if (have_spare_)
            {
                have_spare_ = false;
                return spare_;
            }
            double u1 = uniform();
            while (u1 <= 0.0)
                u1 = uniform();
            const double u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double a = 2.0 * M_PI * u2;
            spare_ = r * std::sin(a);
            have_spare_ = true;
            return r * std::cos(a);
        }

        // Circularly-symmetric complex Gaussian, unit variance.
        std::complex<double> cnormal()
        {
            const double re = normal();
            const double im = normal();
            return {re * M_SQRT1_2, im * M_SQRT1_2};
        }

        // Derive an independent stream for a sub-component.
        static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
        {
            // splitmix64 mixing of (seed, stream)
            std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

    private:
        std::mt19937_64 gen_;
        double spare_ = 0.0;
        bool have_spare_ = false;
    };

} // namespace rismask

#endif
