/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace slosh {

/// Seeded random stream with fixed algorithms for every draw, so a seed
/// reproduces the same sequence on any platform. std::*_distribution is
/// implementation-defined and deliberately not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. One value per call, no caching,
    /// so the draw order is independent of call-site pairing.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Uniform integer in [0, n).
    std::uint64_t integer(std::uint64_t n) { return engine_() % n; }

    /// Derive an independent stream, e.g. one per restart or recording.
    /// Depends only on the root seed and the salt, not on draws made so far.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t x = seed_ + 0x9e3779b97f4a7c15ULL * (salt + 1);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        return Rng(x);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

} // namespace slosh
