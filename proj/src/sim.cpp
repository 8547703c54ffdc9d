/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/sim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slosh/rng.hpp"

namespace slosh {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("sim: " + what);
}

struct Deriv {
    double deps;  // d(eps)/dt
    double ddeps; // d(deps)/dt
};

/// Right-hand side of the surface-offset equation. `cube` is the prefactor
/// kappa*(L/6h)^2 of the cubic velocity term, `w2` the squared natural
/// frequency 12*g*h/L^2.
Deriv rhs(double eps, double deps, double gamma, double cube, double w2) {
    return {deps, -gamma * deps - cube * deps * deps * deps - w2 * eps};
}

SimTrace integrate(const SimConfig& cfg, double kappa) {
    cfg.validate();

    // 10x oversampled fixed-step RK4, decimated to the output rate. The
    // oscillation sits far below the integration rate, so fixed steps hold
    // the local error well under the fit tolerances used downstream.
    constexpr int kOversample = 10;
    const double dt = 1.0 / (kOversample * cfg.sample_rate);
    const std::size_t n_out = static_cast<std::size_t>(std::llround(cfg.duration * cfg.sample_rate)) + 1;

    const double w2 = cfg.natural_frequency_sq();
    const double lever = cfg.L / (6.0 * cfg.h); // maps eps rates to bulk motion
    const double cube = kappa * lever * lever;

    SimTrace out;
    out.sample_rate = cfg.sample_rate;
    out.t.reserve(n_out);
    out.eps.reserve(n_out);
    out.deps.reserve(n_out);
    out.fx.reserve(n_out);
    out.energy.reserve(n_out);

    double eps = cfg.eps0;
    double deps = cfg.deps0;

    auto record = [&](std::size_t i) {
        const Deriv d = rhs(eps, deps, cfg.gamma, cube, w2);
        out.t.push_back(static_cast<double>(i) / cfg.sample_rate);
        out.eps.push_back(eps);
        out.deps.push_back(deps);
        out.fx.push_back(cfg.m * (-d.ddeps * lever));
        const double v = deps * lever;
        out.energy.push_back(0.5 * cfg.m * v * v + cfg.m * cfg.g * eps * eps / (6.0 * cfg.h));
    };

    record(0);
    for (std::size_t i = 1; i < n_out; ++i) {
        for (int s = 0; s < kOversample; ++s) {
            const Deriv k1 = rhs(eps, deps, cfg.gamma, cube, w2);
            const Deriv k2 = rhs(eps + 0.5 * dt * k1.deps, deps + 0.5 * dt * k1.ddeps, cfg.gamma, cube, w2);
            const Deriv k3 = rhs(eps + 0.5 * dt * k2.deps, deps + 0.5 * dt * k2.ddeps, cfg.gamma, cube, w2);
            const Deriv k4 = rhs(eps + dt * k3.deps, deps + dt * k3.ddeps, cfg.gamma, cube, w2);
            eps += dt / 6.0 * (k1.deps + 2.0 * k2.deps + 2.0 * k3.deps + k4.deps);
            deps += dt / 6.0 * (k1.ddeps + 2.0 * k2.ddeps + 2.0 * k3.ddeps + k4.ddeps);
        }
        if (!std::isfinite(eps) || !std::isfinite(deps))
            throw std::runtime_error("sim: state diverged during integration");
        record(i);
    }
    return out;
}

} // namespace

void SimConfig::validate() const {
    auto positive = [&](double v, const char* name) {
        require(std::isfinite(v) && v > 0.0, std::string(name) + " must be positive and finite");
    };
    auto nonneg = [&](double v, const char* name) {
        require(std::isfinite(v) && v >= 0.0, std::string(name) + " must be non-negative and finite");
    };
    positive(L, "L");
    positive(h, "h");
    positive(m, "m");
    positive(g, "g");
    positive(duration, "duration");
    positive(sample_rate, "sample_rate");
    nonneg(gamma, "gamma");
    nonneg(kappa, "kappa");
    nonneg(noise_std, "noise_std");
    require(std::isfinite(eps0), "eps0 must be finite");
    require(std::isfinite(deps0), "deps0 must be finite");
    require(std::isfinite(slip_c2) && std::isfinite(slip_c1) && std::isfinite(slip_c0),
            "slip coefficients must be finite");
    require(n_markers >= 1, "n_markers must be at least 1");
    require(std::isfinite(marker_gain_spread) && marker_gain_spread >= 0.0 && marker_gain_spread < 1.0,
            "marker_gain_spread must lie in [0, 1)");
}

SimTrace simulate_linear(const SimConfig& cfg) { return integrate(cfg, 0.0); }

SimTrace simulate_nonlinear(const SimConfig& cfg) { return integrate(cfg, cfg.kappa); }

MarkerLayout sample_marker_layout(const SimConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng = Rng(seed).fork(1);
    const double max_angle = std::numbers::pi / 12.0; // 15 degrees
    MarkerLayout layout;
    layout.gains.reserve(cfg.n_markers);
    layout.dir_x.reserve(cfg.n_markers);
    layout.dir_y.reserve(cfg.n_markers);
    for (int k = 0; k < cfg.n_markers; ++k) {
        layout.gains.push_back(rng.uniform(1.0 - cfg.marker_gain_spread, 1.0 + cfg.marker_gain_spread));
        const double angle = rng.uniform(-max_angle, max_angle);
        layout.dir_x.push_back(std::cos(angle));
        layout.dir_y.push_back(std::sin(angle));
    }
    return layout;
}

MarkerSeries render_markers(const SimTrace& trace, const SimConfig& cfg, std::uint64_t seed) {
    return render_markers_with_layout(trace, cfg, sample_marker_layout(cfg, seed), seed);
}

MarkerSeries render_markers_with_layout(const SimTrace& trace, const SimConfig& cfg,
                                        const MarkerLayout& layout, std::uint64_t seed) {
    cfg.validate();
    const std::size_t m = layout.gains.size();
    require(m >= 1, "layout must hold at least one marker");
    require(layout.dir_x.size() == m && layout.dir_y.size() == m, "layout arrays must match in size");
    require(!trace.t.empty() && trace.t.size() == trace.fx.size(), "trace must be non-empty and consistent");

    Rng noise = Rng(seed).fork(2);
    MarkerSeries series;
    series.sample_rate = trace.sample_rate;
    series.t = trace.t;
    series.n_markers = static_cast<int>(m);
    series.disp.resize(trace.t.size() * 2 * m);

    // Fixed draw order (per sample, per marker, x then y) keeps recordings
    // reproducible across layout changes of equal marker count.
    std::size_t idx = 0;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        const double t = trace.t[i];
        const double slip = (cfg.slip_c2 * t + cfg.slip_c1) * t + cfg.slip_c0;
        for (std::size_t k = 0; k < m; ++k) {
            const double amp = layout.gains[k] * trace.fx[i];
            double nx = 0.0, ny = 0.0;
            if (cfg.noise_std > 0.0) {
                nx = noise.normal(0.0, cfg.noise_std);
                ny = noise.normal(0.0, cfg.noise_std);
            }
            series.disp[idx++] = amp * layout.dir_x[k] + slip + nx;
            series.disp[idx++] = amp * layout.dir_y[k] + ny;
        }
    }
    return series;
}

} // namespace slosh
