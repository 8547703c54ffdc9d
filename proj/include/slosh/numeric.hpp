/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slosh {

/// Angular frequency (rad/s) of the strongest spectral component of a
/// uniformly sampled signal. Hann-windowed DTFT magnitude maximised over a
/// dense frequency grid, then refined by parabolic interpolation. Searches
/// [omega_min, omega_max]; pass 0 for omega_max to search up to 0.95 Nyquist.
double dominant_angular_frequency(std::span<const double> u, double sample_rate,
                                  double omega_min = 0.0, double omega_max = 0.0);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least-squares line y = slope*x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct QuadraticFit {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;
};

/// Ordinary least-squares parabola y = c2*x^2 + c1*x + c0.
QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y);

/// Exponential-decay envelope of an oscillation: collects the local maxima of
/// |u| and regresses log|peak| on time. Returns {slope, log-intercept};
/// a signal decaying as B*exp(-lambda*t) gives slope = -lambda,
/// intercept = log(B). Requires at least two interior peaks.
LineFit log_envelope_fit(std::span<const double> u, double sample_rate);

/// Centered moving average with window length `window` (clamped at edges).
std::vector<double> moving_average(std::span<const double> u, std::size_t window);

/// Interior local maxima of |u|: indices i with |u[i]| >= neighbours and
/// |u[i]| > 0.
std::vector<std::size_t> abs_peak_indices(std::span<const double> u);

/// Times where the signal crosses zero, by linear interpolation between
/// samples of opposite sign.
std::vector<double> zero_crossing_times(std::span<const double> u, double sample_rate);

} // namespace slosh
