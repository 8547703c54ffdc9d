/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace slosh {

struct NelderMeadOptions {
    std::size_t max_iters = 4000;
    /// Relative spread of simplex values at which to stop.
    double tol = 1e-9;
    /// Simplex diameter, relative to the initial step of each dimension,
    /// that must also be reached before stopping. Guards against flat
    /// value spreads on a still-large simplex.
    double xtol = 1e-6;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimisation (standard reflection/expansion/
/// contraction/shrink coefficients 1, 2, 0.5, 0.5). The initial simplex is
/// x0 plus one vertex per dimension offset by steps[d]. Fully deterministic.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options = {});

} // namespace slosh
