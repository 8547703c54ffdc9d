/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/signal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slosh {

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2; // normalized, a0 == 1
};

/// Second-order Butterworth low-pass via the bilinear transform
/// (Q = 1/sqrt(2)), the standard audio-cookbook parameterization.
Biquad design_lowpass(double sample_rate, double cutoff_hz) {
    const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
    const double cw = std::cos(w0);
    const double alpha = std::sin(w0) * std::numbers::sqrt2 / 2.0;
    const double a0 = 1.0 + alpha;
    Biquad q;
    q.b0 = (1.0 - cw) / 2.0 / a0;
    q.b1 = (1.0 - cw) / a0;
    q.b2 = q.b0;
    q.a1 = -2.0 * cw / a0;
    q.a2 = (1.0 - alpha) / a0;
    return q;
}

/// Direct-form II transposed, state preloaded with the steady-state response
/// to a constant at the first sample, so constants pass through exactly.
void filter_in_place(const Biquad& q, std::vector<double>& x) {
    if (x.empty()) return;
    const double zi1 = 1.0 - q.b0;
    const double zi2 = q.b2 - q.a2;
    double z1 = zi1 * x.front();
    double z2 = zi2 * x.front();
    for (double& v : x) {
        const double in = v;
        const double out = q.b0 * in + z1;
        z1 = q.b1 * in - q.a1 * out + z2;
        z2 = q.b2 * in - q.a2 * out;
        v = out;
    }
}

} // namespace

std::vector<double> lowpass_channel(std::span<const double> x, double sample_rate,
                                    double cutoff_hz) {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw std::invalid_argument("lowpass: sample_rate must be positive");
    }
    if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate / 2.0) {
        throw std::invalid_argument("lowpass: cutoff must lie in (0, Nyquist)");
    }
    const std::size_t n = x.size();
    if (n < 2) return {x.begin(), x.end()};

    const Biquad q = design_lowpass(sample_rate, cutoff_hz);

    // Odd reflection about the endpoints; three cutoff time constants is
    // enough runway for the fourth-order impulse response to settle.
    const std::size_t pad =
        std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(3.0 * sample_rate / cutoff_hz)));
    std::vector<double> buf;
    buf.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) buf.push_back(2.0 * x[0] - x[pad - i]);
    buf.insert(buf.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i) buf.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

    filter_in_place(q, buf);
    std::reverse(buf.begin(), buf.end());
    filter_in_place(q, buf);
    std::reverse(buf.begin(), buf.end());

    return {buf.begin() + static_cast<std::ptrdiff_t>(pad),
            buf.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

MarkerSeries lowpass(const MarkerSeries& series, double cutoff_hz) {
    MarkerSeries out = series;
    const std::size_t n = series.n_samples();
    const std::size_t channels = series.stride();
    std::vector<double> col(n);
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t i = 0; i < n; ++i) col[i] = series.disp[i * channels + c];
        const std::vector<double> f = lowpass_channel(col, series.sample_rate, cutoff_hz);
        for (std::size_t i = 0; i < n; ++i) out.disp[i * channels + c] = f[i];
    }
    return out;
}

MarkerSeries select_top_markers(const MarkerSeries& series, int k) {
    const int m = series.n_markers;
    if (k < 1 || k > m) {
        throw std::invalid_argument("select_top_markers: k must lie in [1, n_markers]");
    }
    const std::size_t n = series.n_samples();
    const std::size_t channels = series.stride();

    std::vector<std::pair<double, int>> score(m);
    for (int j = 0; j < m; ++j) score[j] = {0.0, j};
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double dx = series.disp[i * channels + 2 * j];
            const double dy = series.disp[i * channels + 2 * j + 1];
            score[j].first += dx * dx + dy * dy;
        }
    }
    // Largest energy first; equal scores resolve to the lower marker index.
    std::sort(score.begin(), score.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<int> kept(k);
    for (int j = 0; j < k; ++j) kept[j] = score[j].second;
    std::sort(kept.begin(), kept.end());

    MarkerSeries out;
    out.sample_rate = series.sample_rate;
    out.t = series.t;
    out.n_markers = k;
    out.disp.resize(n * 2 * static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            out.disp[i * 2 * k + 2 * j] = series.disp[i * channels + 2 * kept[j]];
            out.disp[i * 2 * k + 2 * j + 1] = series.disp[i * channels + 2 * kept[j] + 1];
        }
    }
    return out;
}

PrincipalSignal principal_motion(const MarkerSeries& series) {
    const std::size_t n = series.n_samples();
    const std::size_t c = series.stride();
    if (n < 2 || c == 0) {
        throw std::invalid_argument("principal_motion: need >= 2 samples and >= 1 marker");
    }

    Eigen::MatrixXd x(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < c; ++j) x(i, j) = series.disp[i * c + j];
    }
    x.rowwise() -= x.colwise().mean();

    const Eigen::MatrixXd cov = x.transpose() * x / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("principal_motion: eigendecomposition failed");
    }
    const Eigen::VectorXd evals = es.eigenvalues(); // ascending
    double total = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) total += std::max(evals(i), 0.0);
    const double top = std::max(evals(evals.size() - 1), 0.0);
    if (!(total > 0.0)) {
        throw std::invalid_argument("principal_motion: input has no variance");
    }

    Eigen::VectorXd dir = es.eigenvectors().col(evals.size() - 1);
    Eigen::VectorXd u = x * dir;

    // Sign convention: earliest interior extremum of u (ignoring small
    // wiggles under a tenth of the peak) must be positive; a signal with no
    // interior extremum falls back to its largest-magnitude sample.
    const double peak = u.cwiseAbs().maxCoeff();
    double pivot = 0.0;
    bool found = false;
    for (Eigen::Index i = 1; i + 1 < u.size(); ++i) {
        const double d1 = u(i) - u(i - 1);
        const double d2 = u(i + 1) - u(i);
        if (d1 * d2 <= 0.0 && (d1 != 0.0 || d2 != 0.0) && std::abs(u(i)) >= 0.1 * peak) {
            pivot = u(i);
            found = true;
            break;
        }
    }
    if (!found) {
        Eigen::Index imax = 0;
        u.cwiseAbs().maxCoeff(&imax);
        pivot = u(imax);
    }
    if (pivot < 0.0) {
        u = -u;
        dir = -dir;
    }

    PrincipalSignal out;
    out.sample_rate = series.sample_rate;
    out.t = series.t;
    out.u.assign(u.data(), u.data() + u.size());
    out.principal_direction.assign(dir.data(), dir.data() + dir.size());
    out.variance_ratio = std::clamp(top / total, 0.0, 1.0);
    return out;
}

PrincipalSignal preprocess(const MarkerSeries& series, const PipelineConfig& cfg) {
    const MarkerSeries filtered = lowpass(series, cfg.cutoff_hz);
    const MarkerSeries selected = select_top_markers(filtered, cfg.top_k);
    PrincipalSignal out = principal_motion(selected);
    out.cutoff_hz = cfg.cutoff_hz;
    out.top_k = cfg.top_k;
    out.low_variance = out.variance_ratio < cfg.min_variance_ratio;
    return out;
}

} // namespace slosh
