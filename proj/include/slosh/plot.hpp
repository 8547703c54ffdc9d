/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "slosh/dataset.hpp"
#include "slosh/models.hpp"
#include "slosh/signal.hpp"
#include "slosh/transfer.hpp"

namespace slosh {

/// Input bundle for emit_plotdata. Only the members consulted by the chosen
/// plot kind need to be set:
///   signal    -> "signal"      time trace of the principal motion
///   svm       -> "regions"     class id per (lambda, omega) grid cell
///   regressor -> "surface"     predicted value per (lambda, omega) grid cell
///   report    -> "scatter"     truth against prediction for one target
///   sweep     -> "efficiency"  held-out MAE against training-set size
struct PlotInput {
    const PrincipalSignal* signal = nullptr;
    const SvmModel* svm = nullptr;
    const Regressor* regressor = nullptr;
    const EvalReport* report = nullptr;
    std::span<const EvalReport> sweep;

    /// Target name for "scatter" and "efficiency"; empty picks the first
    /// metric of the report(s).
    std::string target;
    /// Grid resolution per axis for "regions" and "surface"; at least 2.
    int cells = 40;
    /// Axis bounds for "surface". Required for a quadratic model, which keeps
    /// no training data; a GPR surface defaults to its training span and
    /// treats these as overrides when max > min.
    double lambda_min = 0.0, lambda_max = 0.0;
    double omega_min = 0.0, omega_max = 0.0;
};

/// Write <stem>.txt (a plain-text data table with a '#'-prefixed header) and
/// <stem>.svg for the requested plot kind. Both outputs are assembled and
/// validated in memory before anything is written, so a failure never leaves
/// partial files behind. Throws std::invalid_argument on an unknown kind,
/// a missing or empty input, or an unknown target name.
void emit_plotdata(const PlotInput& input, const std::string& kind,
                   const std::filesystem::path& stem);

} // namespace slosh
