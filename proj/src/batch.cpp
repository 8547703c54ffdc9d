/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/batch.hpp"

#include <cstdint>
#include <exception>

namespace slosh {

namespace {

// Map body over [0, n). Exceptions are parked per index and the one with
// the lowest index is rethrown after the join, so failure behavior does not
// depend on the execution policy.
template <typename Body>
void for_each_index(std::size_t n, Exec exec, const Body& body) {
    std::vector<std::exception_ptr> errors(n);
    const auto guarded = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (exec == Exec::openmp) {
#ifdef SLOSH_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            guarded(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            guarded(i);
        }
    }
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

} // namespace

std::vector<PrincipalSignal> preprocess_batch(std::span<const MarkerSeries> recordings,
                                              const PipelineConfig& cfg, Exec exec) {
    std::vector<PrincipalSignal> out(recordings.size());
    for_each_index(recordings.size(), exec,
                   [&](std::size_t i) { out[i] = preprocess(recordings[i], cfg); });
    return out;
}

std::vector<FitResult> fit_batch(std::span<const PrincipalSignal> signals, const FitConfig& cfg,
                                 FitKind kind, Exec exec) {
    std::vector<FitResult> out(signals.size());
    for_each_index(signals.size(), exec,
                   [&](std::size_t i) { out[i] = fit(signals[i], cfg, kind, Exec::serial); });
    return out;
}

} // namespace slosh
