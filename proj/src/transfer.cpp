/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/transfer.hpp"

#include "slosh/optim.hpp"
#include "slosh/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace slosh {

double regressor_mean(const Regressor& model, const FeatureVector& x) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GprModel>) {
                return gpr_predict_mean(m, x);
            } else {
                return quad_predict(m, x);
            }
        },
        model);
}

namespace {

struct Warp {
    double alpha1, alpha2, beta1, beta2;
};

Warp decode(std::span<const double> z) {
    return {std::exp(z[0]), z[1], std::exp(z[2]), z[3]};
}

} // namespace

TransferMap transfer_fit(Regressor base, std::span<const FeatureVector> features,
                         std::span<const double> targets) {
    if (features.size() != targets.size()) {
        throw std::invalid_argument("feature and target counts differ");
    }
    if (features.size() < 4) {
        throw std::invalid_argument("warp fitting needs at least four tuning pairs");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (!std::isfinite(features[i].lambda) || !std::isfinite(features[i].omega) ||
            features[i].omega <= 0.0 || !std::isfinite(targets[i])) {
            throw std::invalid_argument("tuning pairs must be finite with omega > 0");
        }
    }

    const double n = static_cast<double>(features.size());
    double m_l = 0.0, m_w = 0.0;
    for (const auto& f : features) {
        m_l += f.lambda / n;
        m_w += f.omega / n;
    }
    double s_l = 0.0, s_w = 0.0;
    for (const auto& f : features) {
        s_l += (f.lambda - m_l) * (f.lambda - m_l) / n;
        s_w += (f.omega - m_w) * (f.omega - m_w) / n;
    }
    s_l = std::max(std::sqrt(s_l), 1e-6);
    s_w = std::max(std::sqrt(s_w), 1e-6);

    const auto mse_of = [&](const Warp& w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < features.size(); ++i) {
            const FeatureVector q{w.alpha1 * features[i].lambda + w.alpha2,
                                  w.beta1 * features[i].omega + w.beta2};
            const double err = regressor_mean(base, q) - targets[i];
            acc += err * err;
        }
        return acc / n;
    };
    const auto objective = [&](std::span<const double> z) { return mse_of(decode(z)); };

    const double identity_mse = mse_of({1.0, 0.0, 1.0, 0.0});

    NelderMeadOptions nm;
    nm.max_iters = 4000;
    nm.tol = 1e-12;
    nm.xtol = 1e-7;
    const std::vector<double> steps{0.15, 0.2 * s_l, 0.15, 0.2 * s_w};

    Rng rng(0xB50F7C21ULL);
    std::vector<double> best_z{0.0, 0.0, 0.0, 0.0};
    double best_value = identity_mse;
    for (int r = 0; r < 4; ++r) {
        std::vector<double> z0{0.0, 0.0, 0.0, 0.0};
        if (r > 0) {
            Rng fork = rng.fork(static_cast<std::uint64_t>(r));
            z0[0] = fork.normal(0.0, 0.15);
            z0[1] = fork.normal(0.0, 0.3 * s_l);
            z0[2] = fork.normal(0.0, 0.15);
            z0[3] = fork.normal(0.0, 0.3 * s_w);
        }
        const auto res = nelder_mead(objective, z0, steps, nm);
        if (res.value < best_value) {
            best_value = res.value;
            best_z = res.x;
        }
    }

    const Warp w = decode(best_z);
    TransferMap map;
    map.alpha1 = w.alpha1;
    map.alpha2 = w.alpha2;
    map.beta1 = w.beta1;
    map.beta2 = w.beta2;
    map.base = std::move(base);
    return map;
}

double transfer_predict(const TransferMap& map, const FeatureVector& x) {
    return regressor_mean(map.base, map.warp(x));
}

} // namespace slosh
