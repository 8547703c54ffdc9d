/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <span>
#include <vector>

#include "slosh/sim.hpp"

namespace slosh {

/// Stages that reduce a marker recording to one oscillation channel.
struct PipelineConfig {
    double cutoff_hz = 3.0;          ///< low-pass cutoff (Hz)
    int top_k = 16;                  ///< markers kept after magnitude ranking
    double min_variance_ratio = 0.90; ///< below this the result is flagged
};

/// One-dimensional oscillation signal extracted from a recording.
struct PrincipalSignal {
    double sample_rate = 0.0;
    std::vector<double> t;
    std::vector<double> u;
    /// Unit vector over the 2k displacement channels that u projects onto.
    std::vector<double> principal_direction;
    double variance_ratio = 0.0; ///< fraction of variance carried by u
    double cutoff_hz = 0.0;      ///< pipeline settings used, 0 if not via preprocess
    int top_k = 0;
    bool low_variance = false; ///< set when variance_ratio < min_variance_ratio
};

/// Zero-phase low-pass: one channel. Forward-backward pass of a second-order
/// Butterworth-design biquad (net fourth order), unity DC gain, reflective
/// padding of three time constants so edges see no startup transient.
std::vector<double> lowpass_channel(std::span<const double> x, double sample_rate,
                                    double cutoff_hz);

/// Zero-phase low-pass applied independently to every marker channel.
MarkerSeries lowpass(const MarkerSeries& series, double cutoff_hz);

/// Keep the k markers with the largest RMS displacement magnitude over the
/// full window; kept markers stay in original index order.
MarkerSeries select_top_markers(const MarkerSeries& series, int k);

/// Mean-center the channels over time and project onto the first principal
/// direction. The sign is chosen so the earliest extremum of u is positive.
PrincipalSignal principal_motion(const MarkerSeries& series);

/// lowpass -> select_top_markers -> principal_motion, with the low-variance
/// warning flag filled in.
PrincipalSignal preprocess(const MarkerSeries& series, const PipelineConfig& cfg);

} // namespace slosh
