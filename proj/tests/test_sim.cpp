/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "slosh/numeric.hpp"
#include "slosh/sim.hpp"

using namespace slosh;
using std::numbers::pi;

namespace {

// Closed-form solution of eps'' + gamma*eps' + w0sq*eps = 0 in the
// underdamped regime, written against the test rather than the simulator.
struct ClosedForm {
    double lambda, omega, a, b; // e^{-lambda t} (a cos wt + b sin wt)

    static ClosedForm from(const SimConfig& c) {
        ClosedForm s;
        s.lambda = c.gamma / 2.0;
        s.omega = std::sqrt(c.natural_frequency_sq() - s.lambda * s.lambda);
        s.a = c.eps0;
        s.b = (c.deps0 + s.lambda * c.eps0) / s.omega;
        return s;
    }
    double eps(double t) const {
        return std::exp(-lambda * t) * (a * std::cos(omega * t) + b * std::sin(omega * t));
    }
    double deps(double t) const {
        const double e = std::exp(-lambda * t);
        const double c = std::cos(omega * t), s = std::sin(omega * t);
        return e * ((-lambda * a + omega * b) * c + (-lambda * b - omega * a) * s);
    }
};

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_CASE("linear trace matches the closed-form damped oscillation") {
    SimConfig cfg;
    cfg.gamma = 1.0;
    cfg.eps0 = 0.005;
    cfg.deps0 = 0.02;
    const SimTrace tr = simulate_linear(cfg);
    const ClosedForm cf = ClosedForm::from(cfg);

    REQUIRE(tr.t.size() == 391); // 13 s at 30 Hz inclusive of t = 0
    CHECK(tr.t.front() == 0.0);
    CHECK(tr.t.back() == doctest::Approx(13.0));

    const double scale = max_abs(tr.eps);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        CHECK(std::abs(tr.eps[i] - cf.eps(tr.t[i])) < 1e-4 * scale);
        CHECK(std::abs(tr.deps[i] - cf.deps(tr.t[i])) < 1e-4 * scale * cf.omega);
    }
}

TEST_CASE("lateral force equals the analytic bulk reaction") {
    SimConfig cfg;
    cfg.gamma = 0.7;
    const SimTrace tr = simulate_linear(cfg);
    const ClosedForm cf = ClosedForm::from(cfg);
    const double lever = cfg.L / (6.0 * cfg.h);
    const double w0sq = cfg.natural_frequency_sq();
    double scale = max_abs(tr.fx);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        // -m*lever*eps'' with eps'' from the governing equation in closed form.
        const double expected =
            cfg.m * lever * (cfg.gamma * cf.deps(tr.t[i]) + w0sq * cf.eps(tr.t[i]));
        CHECK(std::abs(tr.fx[i] - expected) < 2e-4 * scale);
    }
}

TEST_CASE("oscillation frequency follows sqrt(12gh/L^2 - gamma^2/4) across a grid") {
    for (double h : {0.018, 0.03, 0.04}) {
        for (double L : {0.08, 0.10, 0.125}) {
            for (double gamma : {0.2, 1.0, 3.0}) {
                SimConfig cfg;
                cfg.h = h;
                cfg.L = L;
                cfg.gamma = gamma;
                cfg.duration = 8.0;
                const double expected = std::sqrt(12.0 * cfg.g * h / (L * L) - gamma * gamma / 4.0);
                const SimTrace tr = simulate_linear(cfg);

                // Zero-crossing spacing of a damped cosine is exactly pi/omega.
                const auto times = zero_crossing_times(tr.eps, tr.sample_rate);
                REQUIRE(times.size() >= 6);
                const double span = times.back() - times.front();
                const double measured = pi * static_cast<double>(times.size() - 1) / span;
                CHECK(measured == doctest::Approx(expected).epsilon(2e-3));

                // Spectral peak agrees as a second, coarser instrument.
                const double peak = dominant_angular_frequency(tr.eps, tr.sample_rate);
                CHECK(peak == doctest::Approx(expected).epsilon(0.03));
            }
        }
    }
}

TEST_CASE("reference geometry oscillates near 18.79 rad/s") {
    SimConfig cfg; // gamma 1, h 0.03, L 0.10
    const double expected = std::sqrt(cfg.natural_frequency_sq() - 0.25);
    CHECK(expected == doctest::Approx(18.786).epsilon(1e-3));
    const SimTrace tr = simulate_linear(cfg);
    const auto times = zero_crossing_times(tr.eps, tr.sample_rate);
    const double measured = pi * static_cast<double>(times.size() - 1) / (times.back() - times.front());
    CHECK(measured == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("envelope decays at gamma/2") {
    for (double gamma : {0.4, 1.0, 2.0}) {
        SimConfig cfg;
        cfg.gamma = gamma;
        const SimTrace tr = simulate_linear(cfg);
        const LineFit env = log_envelope_fit(tr.eps, tr.sample_rate);
        CHECK(-env.slope == doctest::Approx(gamma / 2.0).epsilon(0.02));
    }
}

TEST_CASE("energy is conserved without damping and dissipated with it") {
    SimConfig cfg;
    cfg.gamma = 0.0;
    const SimTrace free_tr = simulate_linear(cfg);
    const double e0 = free_tr.energy.front();
    CHECK(e0 > 0.0);
    for (double e : free_tr.energy) CHECK(e == doctest::Approx(e0).epsilon(1e-7));

    cfg.gamma = 1.0;
    const SimTrace damped = simulate_linear(cfg);
    for (std::size_t i = 1; i < damped.energy.size(); ++i) {
        CHECK(damped.energy[i] <= damped.energy[i - 1] * (1.0 + 1e-12));
    }
    CHECK(damped.energy.back() < 1e-3 * damped.energy.front());
}

TEST_CASE("cubic damping vanishes smoothly") {
    SimConfig cfg;
    cfg.kappa = 0.0;
    const SimTrace a = simulate_linear(cfg);
    const SimTrace b = simulate_nonlinear(cfg);
    CHECK(a.eps == b.eps); // bit-identical when the cubic term is off
    CHECK(a.fx == b.fx);

    cfg.kappa = 1e-3;
    const SimTrace c = simulate_nonlinear(cfg);
    double diff = 0.0;
    for (std::size_t i = 0; i < c.eps.size(); ++i) diff = std::max(diff, std::abs(c.eps[i] - a.eps[i]));
    CHECK(diff > 0.0);
    CHECK(diff < 1e-4 * max_abs(a.eps));
}

TEST_CASE("cubic damping steepens early decay relative to late decay") {
    SimConfig cfg;
    cfg.gamma = 0.6;
    cfg.kappa = 200.0;
    cfg.eps0 = 0.03;
    const SimTrace tr = simulate_nonlinear(cfg);

    // First second, while velocities are still large, against the last third.
    const std::size_t early_n = static_cast<std::size_t>(tr.sample_rate);
    const std::size_t third = tr.eps.size() / 3;
    std::vector<double> early(tr.eps.begin(), tr.eps.begin() + early_n);
    std::vector<double> late(tr.eps.end() - third, tr.eps.end());
    const double lam_early = -log_envelope_fit(early, tr.sample_rate).slope;
    const double lam_late = -log_envelope_fit(late, tr.sample_rate).slope;
    CHECK(lam_early > 2.0 * lam_late);
    // Late decay approaches the linear rate once velocities are small.
    CHECK(lam_late == doctest::Approx(cfg.gamma / 2.0).epsilon(0.1));
}

TEST_CASE("unit-gain axis-aligned markers reproduce the force exactly") {
    SimConfig cfg;
    cfg.n_markers = 3;
    const SimTrace tr = simulate_linear(cfg);
    MarkerLayout layout;
    layout.gains = {1.0, 1.0, 1.0};
    layout.dir_x = {1.0, 1.0, 1.0};
    layout.dir_y = {0.0, 0.0, 0.0};
    const MarkerSeries ms = render_markers_with_layout(tr, cfg, layout, 7);
    REQUIRE(ms.n_samples() == tr.t.size());
    for (std::size_t i = 0; i < ms.n_samples(); ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(ms.at(i, 2 * k) == tr.fx[i]);
            CHECK(ms.at(i, 2 * k + 1) == 0.0);
        }
    }
}

TEST_CASE("in-hand slip adds a quadratic drift to the x channel only") {
    SimConfig cfg;
    cfg.n_markers = 1;
    cfg.slip_c2 = 2e-4;
    cfg.slip_c1 = -1e-3;
    cfg.slip_c0 = 5e-3;
    const SimTrace tr = simulate_linear(cfg);
    MarkerLayout layout;
    layout.gains = {0.8};
    layout.dir_x = {1.0};
    layout.dir_y = {0.0};
    const MarkerSeries ms = render_markers_with_layout(tr, cfg, layout, 1);
    for (std::size_t i = 0; i < ms.n_samples(); ++i) {
        const double t = ms.t[i];
        const double drift = (cfg.slip_c2 * t + cfg.slip_c1) * t + cfg.slip_c0;
        CHECK(ms.at(i, 0) - 0.8 * tr.fx[i] == doctest::Approx(drift).epsilon(1e-12));
        CHECK(ms.at(i, 1) == 0.0);
    }
}

TEST_CASE("sensor noise has the configured spread") {
    SimConfig cfg;
    cfg.noise_std = 0.02;
    cfg.n_markers = 25;
    const SimTrace tr = simulate_linear(cfg);
    MarkerLayout layout;
    layout.gains.assign(25, 1.0);
    layout.dir_x.assign(25, 1.0);
    layout.dir_y.assign(25, 0.0);
    const MarkerSeries ms = render_markers_with_layout(tr, cfg, layout, 99);

    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ms.n_samples(); ++i) {
        for (std::size_t k = 0; k < 25; ++k) {
            const double rx = ms.at(i, 2 * k) - tr.fx[i];
            const double ry = ms.at(i, 2 * k + 1);
            sum += rx + ry;
            sq += rx * rx + ry * ry;
            n += 2;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double stddev = std::sqrt(sq / static_cast<double>(n) - mean * mean);
    CHECK(std::abs(mean) < 3.0 * cfg.noise_std / std::sqrt(static_cast<double>(n)));
    CHECK(stddev == doctest::Approx(cfg.noise_std).epsilon(0.03));
}

TEST_CASE("marker layouts stay within the geometry envelope") {
    SimConfig cfg;
    cfg.marker_gain_spread = 0.2;
    const MarkerLayout layout = sample_marker_layout(cfg, 42);
    REQUIRE(layout.gains.size() == 25);
    const double max_tan = std::tan(pi / 12.0);
    bool any_gain_off_one = false, any_dir_off_axis = false;
    for (std::size_t k = 0; k < layout.gains.size(); ++k) {
        CHECK(layout.gains[k] >= 0.8);
        CHECK(layout.gains[k] <= 1.2);
        CHECK(layout.dir_x[k] * layout.dir_x[k] + layout.dir_y[k] * layout.dir_y[k] ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(layout.dir_y[k] / layout.dir_x[k]) <= max_tan * (1.0 + 1e-12));
        any_gain_off_one = any_gain_off_one || std::abs(layout.gains[k] - 1.0) > 0.05;
        any_dir_off_axis = any_dir_off_axis || std::abs(layout.dir_y[k]) > 0.02;
    }
    CHECK(any_gain_off_one);
    CHECK(any_dir_off_axis);
}

TEST_CASE("rendering is deterministic in the seed") {
    SimConfig cfg;
    cfg.noise_std = 0.01;
    const SimTrace tr = simulate_linear(cfg);
    const MarkerSeries a = render_markers(tr, cfg, 1234);
    const MarkerSeries b = render_markers(tr, cfg, 1234);
    const MarkerSeries c = render_markers(tr, cfg, 1235);
    CHECK(a.disp == b.disp);
    CHECK(a.disp != c.disp);

    const MarkerSeries d = render_markers_with_layout(tr, cfg, sample_marker_layout(cfg, 1234), 1234);
    CHECK(a.disp == d.disp);
}

TEST_CASE("configuration validation rejects unusable parameters") {
    SimConfig bad;
    bad.L = 0.0;
    CHECK_THROWS_AS(simulate_linear(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.gamma = -1.0;
    CHECK_THROWS_AS(simulate_linear(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.n_markers = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SimConfig{};
    bad.marker_gain_spread = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SimConfig{};
    bad.sample_rate = -30.0;
    CHECK_THROWS_AS(simulate_linear(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.eps0 = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(simulate_linear(bad), std::invalid_argument);
}
