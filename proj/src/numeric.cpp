/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace slosh {

double dominant_angular_frequency(std::span<const double> u, double sample_rate,
                                  double omega_min, double omega_max) {
    const std::size_t n = u.size();
    if (n < 8) {
        throw std::invalid_argument("dominant_angular_frequency: signal too short");
    }
    const double nyquist = M_PI * sample_rate;
    if (omega_max <= 0.0) {
        omega_max = 0.95 * nyquist;
    }
    omega_max = std::min(omega_max, 0.999 * nyquist);
    if (omega_min < 0.0 || omega_min >= omega_max) {
        throw std::invalid_argument("dominant_angular_frequency: bad search range");
    }

    // Hann window, mean removed, to suppress leakage from the DC/drift part.
    double mean = 0.0;
    for (double v : u) {
        mean += v;
    }
    mean /= static_cast<double>(n);

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                                 static_cast<double>(n - 1));
        w[i] = (u[i] - mean) * hann;
    }

    // Dense DTFT magnitude scan. Grid step ~ 1/8 of the FFT bin width keeps
    // the parabolic refinement well inside its valid region.
    const double duration = static_cast<double>(n - 1) / sample_rate;
    const double step = 2.0 * M_PI / (8.0 * duration);
    const std::size_t n_grid =
        static_cast<std::size_t>(std::floor((omega_max - omega_min) / step)) + 1;

    const double dt = 1.0 / sample_rate;
    auto mag2 = [&](double omega) {
        std::complex<double> acc{0.0, 0.0};
        // Rotation recurrence instead of per-sample trig.
        const std::complex<double> rot{std::cos(omega * dt), -std::sin(omega * dt)};
        std::complex<double> ph{1.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            acc += w[i] * ph;
            ph *= rot;
        }
        return std::norm(acc);
    };

    std::size_t best = 0;
    double best_mag = -1.0;
    std::vector<double> mags(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
        mags[k] = mag2(omega_min + static_cast<double>(k) * step);
        if (mags[k] > best_mag) {
            best_mag = mags[k];
            best = k;
        }
    }

    double omega = omega_min + static_cast<double>(best) * step;
    if (best > 0 && best + 1 < n_grid) {
        // Parabolic refinement on log magnitude.
        const double l0 = std::log(mags[best - 1] + 1e-300);
        const double l1 = std::log(mags[best] + 1e-300);
        const double l2 = std::log(mags[best + 1] + 1e-300);
        const double denom = l0 - 2.0 * l1 + l2;
        if (std::abs(denom) > 1e-12) {
            omega += step * 0.5 * (l0 - l2) / denom;
        }
    }
    return omega;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_line: need >= 2 points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        throw std::invalid_argument("fit_line: degenerate abscissae");
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("fit_quadratic: need >= 3 points");
    }
    // Normal equations for the 3-term basis; condition is fine at this size
    // once x is shifted to its mean.
    double mx = 0.0;
    for (double v : x) {
        mx += v;
    }
    mx /= static_cast<double>(x.size());

    double s[5] = {0, 0, 0, 0, 0};
    double b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i] - mx;
        double p = 1.0;
        for (int k = 0; k < 5; ++k) {
            s[k] += p;
            if (k < 3) {
                b[k] += p * y[i];
            }
            p *= xi;
        }
    }
    double a[3][4] = {
        {s[0], s[1], s[2], b[0]},
        {s[1], s[2], s[3], b[1]},
        {s[2], s[3], s[4], b[2]},
    };
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        std::swap(a[piv], a[col]);
        if (a[col][col] == 0.0) {
            throw std::invalid_argument("fit_quadratic: singular system");
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    const double q2 = a[2][3] / a[2][2];
    const double q1 = a[1][3] / a[1][1];
    const double q0 = a[0][3] / a[0][0];
    // Undo the x shift: y = q2 (x-mx)^2 + q1 (x-mx) + q0.
    QuadraticFit f;
    f.c2 = q2;
    f.c1 = q1 - 2.0 * q2 * mx;
    f.c0 = q0 - q1 * mx + q2 * mx * mx;
    return f;
}

std::vector<std::size_t> abs_peak_indices(std::span<const double> u) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double a = std::abs(u[i]);
        if (a > 0.0 && a >= std::abs(u[i - 1]) && a >= std::abs(u[i + 1])) {
            idx.push_back(i);
            // Skip the plateau partner if any.
            if (std::abs(u[i + 1]) == a) {
                ++i;
            }
        }
    }
    return idx;
}

LineFit log_envelope_fit(std::span<const double> u, double sample_rate) {
    const auto peaks = abs_peak_indices(u);
    if (peaks.size() < 2) {
        throw std::invalid_argument("log_envelope_fit: fewer than two envelope peaks");
    }
    std::vector<double> t, logv;
    t.reserve(peaks.size());
    logv.reserve(peaks.size());
    for (std::size_t i : peaks) {
        t.push_back(static_cast<double>(i) / sample_rate);
        logv.push_back(std::log(std::abs(u[i])));
    }
    return fit_line(t, logv);
}

std::vector<double> moving_average(std::span<const double> u, std::size_t window) {
    const std::size_t n = u.size();
    if (window < 1) {
        window = 1;
    }
    std::vector<double> out(n);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(window) / 2;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + u[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - half);
        const std::ptrdiff_t hi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1,
                                     static_cast<std::ptrdiff_t>(i) + half);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> zero_crossing_times(std::span<const double> u, double sample_rate) {
    std::vector<double> times;
    for (std::size_t i = 1; i < u.size(); ++i) {
        if ((u[i - 1] < 0.0 && u[i] > 0.0) || (u[i - 1] > 0.0 && u[i] < 0.0)) {
            const double frac = u[i - 1] / (u[i - 1] - u[i]);
            times.push_back((static_cast<double>(i - 1) + frac) / sample_rate);
        } else if (u[i - 1] == 0.0 && i >= 2 && u[i] != 0.0 && u[i - 2] != 0.0 &&
                   ((u[i - 2] < 0.0) != (u[i] < 0.0))) {
            times.push_back(static_cast<double>(i - 1) / sample_rate);
        }
    }
    return times;
}

} // namespace slosh
