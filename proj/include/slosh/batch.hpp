/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <span>
#include <vector>

#include "slosh/exec.hpp"
#include "slosh/fit.hpp"
#include "slosh/signal.hpp"

namespace slosh {

// Recording-level pipeline stages mapped over a batch. Items are processed
// independently, so the two execution policies produce identical results;
// an exception from any item is rethrown after the batch joins, lowest
// index first.

/// Run the preprocessing pipeline on every recording.
std::vector<PrincipalSignal> preprocess_batch(std::span<const MarkerSeries> recordings,
                                              const PipelineConfig& cfg,
                                              Exec exec = Exec::openmp);

/// Decay-fit every signal. Parallelism is across items; the per-item
/// restarts run serially to avoid nested thread teams.
std::vector<FitResult> fit_batch(std::span<const PrincipalSignal> signals,
                                 const FitConfig& cfg = {},
                                 FitKind kind = FitKind::two_component,
                                 Exec exec = Exec::openmp);

} // namespace slosh
