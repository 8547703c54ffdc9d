/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "slosh/fit.hpp"
#include "slosh/sim.hpp"
#include "slosh/signal.hpp"
#include "slosh/transfer.hpp"

namespace slosh {

// One save/load pair per pipeline artifact. All writers emit UTF-8 text with
// LF line endings and create missing parent directories; loaders throw
// std::invalid_argument on missing or malformed files. Numbers are written
// so a round trip restores every stored double bit-exactly.

/// Tactile recording as CSV `t,m0x,m0y,...`, one row per sample. The sample
/// rate is not a column; load reconstructs it from the median time step, so
/// it can differ from the original in the last bit.
void save_marker_series(const MarkerSeries& series, const std::filesystem::path& path);
MarkerSeries load_marker_series(const std::filesystem::path& path);

/// Simulator parameters as `key=value` lines. Loading starts from defaults,
/// so a partial file overrides only the listed keys; unknown keys are
/// rejected. `#` lines and blank lines are ignored.
void save_sim_config(const SimConfig& cfg, const std::filesystem::path& path);
SimConfig load_sim_config(const std::filesystem::path& path);

/// Oscillation channel as CSV `t,u` plus a `<path>.meta` sidecar holding
/// variance_ratio, cutoff and k. The principal direction is not persisted.
/// A missing sidecar is tolerated (metadata reads as zero); the low-variance
/// flag is restored against the default 0.90 threshold.
void save_principal_signal(const PrincipalSignal& signal, const std::filesystem::path& path);
PrincipalSignal load_principal_signal(const std::filesystem::path& path);

/// Decay-fit output as `key=value` lines with the fixed field names lambda,
/// omega, lambda_p, omega_p, B, B_p, psi, psi_p, c2, c1, c0, loss,
/// converged. Every field is required on load.
void save_fit_result(const FitResult& result, const std::filesystem::path& path);
FitResult load_fit_result(const std::filesystem::path& path);

/// Any trainable model the toolkit persists.
using AnyModel = std::variant<GprModel, QuadModel, SvmModel, TransferMap>;

/// Kind tag used in the model container: gpr, quad, svm or xfer.
std::string model_kind(const AnyModel& model);

/// Versioned text container starting with the line `SLOSH-MODEL v1`.
/// Doubles are stored as hex floats, so a loaded model predicts bit-exactly
/// what the saved model predicted. A transfer map embeds its base model.
void save_model(const AnyModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

} // namespace slosh
