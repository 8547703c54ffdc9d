/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slosh/exec.hpp"
#include "slosh/signal.hpp"

namespace slosh {

/// Two damped cosines plus a quadratic drift:
///   u(t) = B e^{-lambda t} cos(omega t + psi)
///        + Bp e^{-lambdap t} cos(omegap t + psip)
///        + c2 t^2 + c1 t + c0
/// The first component is the slow one: lambdap > lambda always holds for
/// parameters produced by fit().
struct FitParams {
    double B = 0.0, lambda = 0.0, omega = 0.0, psi = 0.0;
    double Bp = 0.0, lambdap = 1.0, omegap = 1.0, psip = 0.0;
    double c2 = 0.0, c1 = 0.0, c0 = 0.0;
};

struct FitConfig {
    /// Loss stabilizer, relative to mean(u^2) so that the loss is invariant
    /// under rescaling of u.
    double delta = 1e-3;
    int n_restarts = 8;
    std::size_t max_iters = 20000; ///< simplex iterations per restart
    double tol = 1e-9;            ///< relative loss-spread stopping tolerance
    std::uint64_t seed = 0;       ///< drives the restart jitter only
};

/// two_component fits the full model; single_component drops the fast
/// cosine (used to expose the bias it corrects).
enum class FitKind { two_component, single_component };

struct FitResult {
    FitParams params;
    double loss = 0.0;
    struct Features {
        double lambda = 0.0;
        double omega = 0.0;
    } features; ///< decay and frequency of the energy-dominant component
    bool converged = false;
    int n_restarts_used = 0;
};

/// Evaluate the model at the given times. Accepts any parameter values.
std::vector<double> model_eval(const FitParams& params, std::span<const double> t);

/// Tail-weighted squared error: sum over samples of
/// (u - model)^2 / (u^2 + delta_abs) with delta_abs = cfg.delta * mean(u^2).
/// Model time is measured from the first sample of the signal.
double loss_eval(const FitParams& params, const PrincipalSignal& signal, const FitConfig& cfg);

/// Minimize loss_eval over the model parameters by multi-start simplex
/// search. lambdap > lambda is built into the parameterization. Deterministic
/// for fixed inputs; restarts may run in parallel without changing the
/// result. Throws std::invalid_argument for flat or too-short signals.
FitResult fit(const PrincipalSignal& signal, const FitConfig& cfg = {},
              FitKind kind = FitKind::two_component, Exec exec = Exec::openmp);

} // namespace slosh
