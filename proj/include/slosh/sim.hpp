/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <cstdint>
#include <vector>

namespace slosh {

/// Physical and observation parameters of the liquid-container system.
///
/// The liquid surface offset eps(t) follows a damped second-order system
///   eps'' + gamma*eps' + kappa*(L/6h)^2*eps'^3 + (12*g*h/L^2)*eps = 0
/// started from (eps0, deps0). kappa = 0 gives the linear model whose
/// solution is A*exp(-gamma/2 t)*cos(omega t + phi) with
/// omega = sqrt(12*g*h/L^2 - gamma^2/4).
struct SimConfig {
    double L = 0.10;       ///< container length along the perturbation axis (m)
    double h = 0.03;       ///< liquid height (m)
    double m = 0.30;       ///< liquid mass (kg)
    double g = 9.81;       ///< gravity (m/s^2)
    double gamma = 1.0;    ///< linear damping factor (1/s)
    double kappa = 0.0;    ///< cubic damping factor (s/m^2)
    double eps0 = 0.005;   ///< initial surface offset (m)
    double deps0 = 0.0;    ///< initial surface velocity (m/s)
    double duration = 13.0;    ///< recording length (s)
    double sample_rate = 30.0; ///< output sample rate (Hz)

    // Observation model for synthetic marker recordings.
    double noise_std = 0.0;          ///< per-component Gaussian noise (signal units)
    double slip_c2 = 0.0;            ///< quadratic in-hand drift coefficients
    double slip_c1 = 0.0;
    double slip_c0 = 0.0;
    int n_markers = 25;              ///< synthetic marker count
    double marker_gain_spread = 0.2; ///< relative gain variation across markers

    void validate() const; ///< throws std::invalid_argument on bad parameters

    double natural_frequency_sq() const { return 12.0 * g * h / (L * L); }
};

/// Time series produced by the simulator.
struct SimTrace {
    double sample_rate = 0.0;
    std::vector<double> t;      ///< time samples (s)
    std::vector<double> eps;    ///< surface offset (m)
    std::vector<double> deps;   ///< surface velocity (m/s)
    std::vector<double> fx;     ///< lateral force on the gripper (N)
    std::vector<double> energy; ///< system energy 1/2 m (eps' L/6h)^2 + m g eps^2/6h (J)
};

/// Raw tactile recording: per-sample x,y displacement of M markers.
/// Column layout is [m0x, m0y, m1x, m1y, ...]; value i*stride()+2*k is
/// marker k's x displacement at sample i.
struct MarkerSeries {
    double sample_rate = 0.0;
    std::vector<double> t;
    std::vector<double> disp; ///< row-major, n_samples x 2*n_markers
    int n_markers = 0;

    std::size_t n_samples() const { return t.size(); }
    std::size_t stride() const { return 2 * static_cast<std::size_t>(n_markers); }
    double at(std::size_t sample, std::size_t column) const {
        return disp[sample * stride() + column];
    }
};

/// Per-marker observation geometry: displacement of marker k is
/// gain[k] * dir[k] * fx(t), with dir a unit 2-vector near the x axis.
struct MarkerLayout {
    std::vector<double> gains;
    std::vector<double> dir_x;
    std::vector<double> dir_y;
};

/// Integrate the linear model (kappa treated as zero).
SimTrace simulate_linear(const SimConfig& cfg);

/// Integrate the cubic-damped model. With kappa = 0 the output is
/// bit-identical to simulate_linear.
SimTrace simulate_nonlinear(const SimConfig& cfg);

/// Marker geometry drawn from the seed: gains uniform within
/// 1 +- marker_gain_spread, directions within +-15 degrees of the x axis.
MarkerLayout sample_marker_layout(const SimConfig& cfg, std::uint64_t seed);

/// Synthesize a tactile recording from a trace: per-marker scaled force plus
/// quadratic drift on the x channel plus i.i.d. Gaussian noise.
/// Deterministic for a fixed seed.
MarkerSeries render_markers(const SimTrace& trace, const SimConfig& cfg, std::uint64_t seed);

/// Same, with an explicit layout (the seed then only drives the noise).
MarkerSeries render_markers_with_layout(const SimTrace& trace, const SimConfig& cfg,
                                        const MarkerLayout& layout, std::uint64_t seed);

} // namespace slosh
