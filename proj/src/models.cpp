/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/models.hpp"

#include "slosh/optim.hpp"
#include "slosh/rng.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slosh {

namespace {

void check_features(std::span<const FeatureVector> features) {
    for (const auto& f : features) {
        if (!std::isfinite(f.lambda) || !std::isfinite(f.omega) || f.omega <= 0.0) {
            throw std::invalid_argument("feature vectors must be finite with omega > 0");
        }
    }
}

void check_targets(std::span<const double> targets) {
    for (double v : targets) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("targets must be finite");
        }
    }
}

double population_variance(std::span<const double> v, double mean) {
    double acc = 0.0;
    for (double x : v) {
        acc += (x - mean) * (x - mean);
    }
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

} // namespace

double viscosity_to_mu(double nu_cst) {
    if (!(nu_cst > 0.0) || !std::isfinite(nu_cst)) {
        throw std::invalid_argument("kinematic viscosity must be positive");
    }
    return std::log10(nu_cst);
}

Standardizer Standardizer::fit(std::span<const FeatureVector> features) {
    if (features.empty()) {
        throw std::invalid_argument("cannot standardize an empty feature set");
    }
    const double n = static_cast<double>(features.size());
    Standardizer s;
    for (const auto& f : features) {
        s.mean[0] += f.lambda / n;
        s.mean[1] += f.omega / n;
    }
    std::array<double, 2> var{0.0, 0.0};
    for (const auto& f : features) {
        var[0] += (f.lambda - s.mean[0]) * (f.lambda - s.mean[0]) / n;
        var[1] += (f.omega - s.mean[1]) * (f.omega - s.mean[1]) / n;
    }
    for (int d = 0; d < 2; ++d) {
        s.scale[d] = std::max(std::sqrt(var[d]), 1e-12 * (1.0 + std::abs(s.mean[d])));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Gaussian process regression
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& x, double ell1, double ell2, double sigma_f2) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = sigma_f2;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d1 = (x(i, 0) - x(j, 0)) / ell1;
            const double d2 = (x(i, 1) - x(j, 1)) / ell2;
            const double v = sigma_f2 * std::exp(-0.5 * (d1 * d1 + d2 * d2));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

// Cholesky with diagonal jitter escalation, relative to the mean diagonal.
// Returns false when the matrix stays indefinite even at the largest jitter.
bool chol_with_jitter(const Eigen::MatrixXd& k, Eigen::LLT<Eigen::MatrixXd>& llt) {
    llt.compute(k);
    if (llt.info() == Eigen::Success) {
        return true;
    }
    const double mean_diag = k.diagonal().mean();
    for (double jitter = 1e-10; jitter <= 1e-4 * 1.0000001; jitter *= 10.0) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter * mean_diag;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) {
            return true;
        }
    }
    return false;
}

struct GprObjective {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& yc; // centered targets
    std::array<double, 4> lo;  // bounds on [log l1, log l2, log sf2, log sn2]
    std::array<double, 4> hi;

    std::array<double, 4> clamp(std::span<const double> theta) const {
        std::array<double, 4> t{};
        for (int d = 0; d < 4; ++d) {
            t[d] = std::clamp(theta[static_cast<std::size_t>(d)], lo[d], hi[d]);
        }
        return t;
    }

    // Negative log marginal likelihood, plus a quadratic penalty pulling
    // out-of-bounds parameters back into the box.
    double operator()(std::span<const double> theta) const {
        const auto t = clamp(theta);
        double penalty = 0.0;
        for (int d = 0; d < 4; ++d) {
            const double excess = theta[static_cast<std::size_t>(d)] - t[d];
            penalty += excess * excess;
        }
        const double nll = unconstrained(t);
        return nll + 1e3 * penalty;
    }

    double unconstrained(const std::array<double, 4>& t) const {
        const Eigen::Index n = x.rows();
        Eigen::MatrixXd k = rbf_gram(x, std::exp(t[0]), std::exp(t[1]), std::exp(t[2]));
        k.diagonal().array() += std::exp(t[3]);
        Eigen::LLT<Eigen::MatrixXd> llt;
        if (!chol_with_jitter(k, llt)) {
            return 1e250;
        }
        const Eigen::VectorXd alpha = llt.solve(yc);
        const double quad = yc.dot(alpha);
        const double log_det = llt.matrixLLT().diagonal().array().log().sum();
        return 0.5 * quad + log_det +
               0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    }

    // Negative log marginal likelihood with its gradient in the log
    // hyperparameters, via d nll = -1/2 tr((aa' - K^-1) dK).
    double with_gradient(const std::array<double, 4>& t, std::array<double, 4>& grad) const {
        const Eigen::Index n = x.rows();
        const double l1 = std::exp(t[0]), l2 = std::exp(t[1]);
        const double sf2 = std::exp(t[2]), sn2 = std::exp(t[3]);
        Eigen::MatrixXd r(n, n), d1(n, n), d2(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            r(i, i) = 1.0;
            d1(i, i) = 0.0;
            d2(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double a = (x(i, 0) - x(j, 0)) / l1;
                const double b = (x(i, 1) - x(j, 1)) / l2;
                r(i, j) = r(j, i) = std::exp(-0.5 * (a * a + b * b));
                d1(i, j) = d1(j, i) = a * a;
                d2(i, j) = d2(j, i) = b * b;
            }
        }
        Eigen::MatrixXd k = sf2 * r;
        k.diagonal().array() += sn2;
        Eigen::LLT<Eigen::MatrixXd> llt;
        if (!chol_with_jitter(k, llt)) {
            grad = {0.0, 0.0, 0.0, -1.0}; // more noise is the only way out
            return 1e250;
        }
        const Eigen::VectorXd alpha = llt.solve(yc);
        const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
        const Eigen::MatrixXd a = alpha * alpha.transpose() - kinv;

        const Eigen::ArrayXXd m = a.array() * r.array();
        grad[0] = -0.5 * sf2 * (m * d1.array()).sum();
        grad[1] = -0.5 * sf2 * (m * d2.array()).sum();
        grad[2] = -0.5 * sf2 * m.sum();
        grad[3] = -0.5 * sn2 * a.trace();
        return 0.5 * yc.dot(alpha) + llt.matrixLLT().diagonal().array().log().sum() +
               0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    }

    // Projected gradient descent on the negative likelihood with a capped
    // step. The cap keeps each restart inside the basin it started in:
    // likelihood maxima that memorize replicated grid targets with
    // near-zero noise sit behind a barrier and generalize poorly, and a
    // local ascent never crosses into them.
    std::array<double, 4> descend(const std::array<double, 4>& start, int max_iters) const {
        std::array<double, 4> theta = start;
        for (int d = 0; d < 4; ++d) {
            theta[d] = std::clamp(theta[d], lo[d], hi[d]);
        }
        std::array<double, 4> grad{};
        double value = with_gradient(theta, grad);
        double step = 0.1;
        constexpr double kMaxMove = 0.25; // log units per iteration
        for (int it = 0; it < max_iters; ++it) {
            std::array<double, 4> dir{};
            double gmax = 0.0;
            for (int d = 0; d < 4; ++d) {
                dir[d] = -grad[d];
                if ((theta[d] <= lo[d] && dir[d] < 0.0) || (theta[d] >= hi[d] && dir[d] > 0.0)) {
                    dir[d] = 0.0;
                }
                gmax = std::max(gmax, std::abs(dir[d]));
            }
            if (gmax < 1e-10) {
                break;
            }
            double s = std::min(step, kMaxMove / gmax);
            bool accepted = false;
            for (int bt = 0; bt < 30; ++bt) {
                std::array<double, 4> cand{};
                for (int d = 0; d < 4; ++d) {
                    cand[d] = std::clamp(theta[d] + s * dir[d], lo[d], hi[d]);
                }
                std::array<double, 4> cgrad{};
                const double cval = with_gradient(cand, cgrad);
                if (cval < value - 1e-14 * (1.0 + std::abs(value))) {
                    theta = cand;
                    value = cval;
                    grad = cgrad;
                    step = 1.7 * s;
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if (!accepted) {
                break;
            }
        }
        return theta;
    }
};

} // namespace

GprModel gpr_train(std::span<const FeatureVector> features, std::span<const double> targets) {
    if (features.size() != targets.size()) {
        throw std::invalid_argument("feature and target counts differ");
    }
    if (features.size() < 2) {
        throw std::invalid_argument("regression needs at least two training points");
    }
    check_features(features);
    check_targets(targets);
    bool distinct = false;
    for (std::size_t i = 1; i < features.size() && !distinct; ++i) {
        distinct = features[i].lambda != features[0].lambda || features[i].omega != features[0].omega;
    }
    if (!distinct) {
        throw std::invalid_argument("training points must not all coincide");
    }

    GprModel model;
    model.standardizer = Standardizer::fit(features);
    const Eigen::Index n = static_cast<Eigen::Index>(features.size());
    model.x.resize(n, 2);
    model.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto z = model.standardizer.apply(features[static_cast<std::size_t>(i)]);
        model.x(i, 0) = z[0];
        model.x(i, 1) = z[1];
        model.y(i) = targets[static_cast<std::size_t>(i)];
    }
    model.y_mean = model.y.mean();
    const Eigen::VectorXd yc = model.y.array() - model.y_mean;

    const double var_y =
        std::max(population_variance(targets, model.y_mean), 1e-12 * (1.0 + model.y_mean * model.y_mean));

    // The noise floor matters: with exactly replicated targets (grid datasets)
    // the likelihood otherwise rewards memorizing each grid column with
    // near-zero noise, which generalizes poorly between columns.
    GprObjective obj{model.x, yc,
                     {std::log(1e-2), std::log(1e-2), std::log(1e-3 * var_y), std::log(3e-5 * var_y)},
                     {std::log(1e2), std::log(1e2), std::log(1e3 * var_y), std::log(1.0 * var_y)}};

    // Deterministic multi-start search over log hyperparameters. The first
    // start is a canonical smooth prior; the rest draw log-uniformly from a
    // moderate-smoothness, moderate-noise box. Each restart follows the local
    // likelihood gradient and then polishes with a small simplex, so the
    // chosen optimum is the best *local* maximum reachable from plausible
    // starts rather than a degenerate global one.
    constexpr int kRestarts = 16;
    Rng rng(0x51093D07ULL);
    NelderMeadOptions nm;
    nm.max_iters = 600;
    nm.tol = 1e-10;
    nm.xtol = 1e-7;
    const std::vector<double> steps{0.1, 0.1, 0.1, 0.1};

    std::vector<double> best_theta;
    double best_value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < kRestarts; ++r) {
        std::array<double, 4> theta0{};
        if (r == 0) {
            theta0 = {0.0, 0.0, std::log(var_y), std::log(1e-2 * var_y)};
        } else {
            theta0[0] = rng.uniform(std::log(0.3), std::log(10.0));
            theta0[1] = rng.uniform(std::log(0.3), std::log(10.0));
            theta0[2] = rng.uniform(std::log(0.3 * var_y), std::log(5.0 * var_y));
            theta0[3] = rng.uniform(std::log(1e-3 * var_y), std::log(0.3 * var_y));
        }
        const auto localized = obj.descend(theta0, 25);
        const std::vector<double> polish_start(localized.begin(), localized.end());
        const auto res = nelder_mead(obj, polish_start, steps, nm);
        if (res.value < best_value) {
            best_value = res.value;
            best_theta = res.x;
        }
    }

    const auto t = obj.clamp(best_theta);
    model.ell1 = std::exp(t[0]);
    model.ell2 = std::exp(t[1]);
    model.sigma_f2 = std::exp(t[2]);
    model.sigma_n2 = std::exp(t[3]);

    gpr_refactor(model);
    model.log_marginal = -obj.unconstrained(t);
    return model;
}

void gpr_refactor(GprModel& model) {
    Eigen::MatrixXd k = rbf_gram(model.x, model.ell1, model.ell2, model.sigma_f2);
    k.diagonal().array() += model.sigma_n2;
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (!chol_with_jitter(k, llt)) {
        throw std::runtime_error("kernel matrix is singular even with jitter");
    }
    model.chol_lower = llt.matrixL();
    model.alpha = llt.solve(Eigen::VectorXd(model.y.array() - model.y_mean));
}

namespace {

Eigen::VectorXd cross_covariance(const GprModel& model, const FeatureVector& x) {
    if (!std::isfinite(x.lambda) || !std::isfinite(x.omega)) {
        throw std::invalid_argument("query features must be finite");
    }
    const auto z = model.standardizer.apply(x);
    const Eigen::Index n = model.x.rows();
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d1 = (z[0] - model.x(i, 0)) / model.ell1;
        const double d2 = (z[1] - model.x(i, 1)) / model.ell2;
        ks(i) = model.sigma_f2 * std::exp(-0.5 * (d1 * d1 + d2 * d2));
    }
    return ks;
}

} // namespace

GprPrediction gpr_predict(const GprModel& model, const FeatureVector& x) {
    const Eigen::VectorXd ks = cross_covariance(model, x);
    GprPrediction out;
    out.mean = model.y_mean + ks.dot(model.alpha);
    const Eigen::VectorXd v =
        model.chol_lower.triangularView<Eigen::Lower>().solve(ks);
    const double var_f = std::max(model.sigma_f2 - v.squaredNorm(), 0.0);
    out.std = std::sqrt(var_f + model.sigma_n2);
    return out;
}

double gpr_predict_mean(const GprModel& model, const FeatureVector& x) {
    return model.y_mean + cross_covariance(model, x).dot(model.alpha);
}

// ---------------------------------------------------------------------------
// Quadratic least squares
// ---------------------------------------------------------------------------

namespace {

std::array<double, 6> quad_basis(const FeatureVector& f) {
    return {1.0, f.lambda, f.omega, f.lambda * f.lambda, f.lambda * f.omega, f.omega * f.omega};
}

} // namespace

QuadModel quad_fit(std::span<const FeatureVector> features, std::span<const double> targets) {
    if (features.size() != targets.size()) {
        throw std::invalid_argument("feature and target counts differ");
    }
    if (features.size() < 6) {
        throw std::invalid_argument("quadratic fit needs at least six points");
    }
    check_features(features);
    check_targets(targets);

    const Eigen::Index n = static_cast<Eigen::Index>(features.size());
    Eigen::MatrixXd a(n, 6);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = quad_basis(features[static_cast<std::size_t>(i)]);
        for (int j = 0; j < 6; ++j) {
            a(i, j) = row[static_cast<std::size_t>(j)];
        }
        y(i) = targets[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 6) {
        throw std::invalid_argument("design matrix is rank deficient; spread the features");
    }
    const Eigen::VectorXd c = qr.solve(y);
    QuadModel model;
    for (int j = 0; j < 6; ++j) {
        model.coeff[static_cast<std::size_t>(j)] = c(j);
    }
    return model;
}

double quad_predict(const QuadModel& model, const FeatureVector& x) {
    const auto row = quad_basis(x);
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) {
        acc += model.coeff[static_cast<std::size_t>(j)] * row[static_cast<std::size_t>(j)];
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Support vector classification
// ---------------------------------------------------------------------------

namespace {

double rbf(const std::array<double, 2>& a, const std::array<double, 2>& b, double w) {
    const double d0 = a[0] - b[0];
    const double d1 = a[1] - b[1];
    return std::exp(-(d0 * d0 + d1 * d1) / w);
}

// Sequential minimal optimization on one binary subproblem. Deterministic:
// the partner index is chosen by largest error gap, then ascending index.
struct BinarySmo {
    const std::vector<std::array<double, 2>>& pts;
    const std::vector<double>& y; // +1 / -1
    double c;
    double w;

    std::vector<double> alpha;
    std::vector<double> err; // decision(i) - y(i)
    double bias = 0.0;
    Eigen::MatrixXd gram;

    explicit BinarySmo(const std::vector<std::array<double, 2>>& p, const std::vector<double>& labels,
                       double c_in, double w_in)
        : pts(p), y(labels), c(c_in), w(w_in) {
        const auto m = static_cast<Eigen::Index>(pts.size());
        gram.resize(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i; j < m; ++j) {
                const double k = rbf(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], w);
                gram(i, j) = k;
                gram(j, i) = k;
            }
        }
        alpha.assign(pts.size(), 0.0);
        err.resize(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            err[i] = -y[i]; // decision is zero at the start
        }
    }

    bool take_step(std::size_t i, std::size_t j) {
        if (i == j) {
            return false;
        }
        const double ai_old = alpha[i];
        const double aj_old = alpha[j];
        double lo = 0.0, hi = 0.0;
        if (y[i] != y[j]) {
            lo = std::max(0.0, aj_old - ai_old);
            hi = std::min(c, c + aj_old - ai_old);
        } else {
            lo = std::max(0.0, ai_old + aj_old - c);
            hi = std::min(c, ai_old + aj_old);
        }
        if (lo >= hi) {
            return false;
        }
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        const double eta = 2.0 * gram(ii, jj) - gram(ii, ii) - gram(jj, jj);
        if (eta >= 0.0) {
            return false; // only at duplicated points; no usable curvature
        }
        double aj = aj_old - y[j] * (err[i] - err[j]) / eta;
        aj = std::clamp(aj, lo, hi);
        if (std::abs(aj - aj_old) < 1e-12 * (aj + aj_old + 1e-12)) {
            return false;
        }
        const double ai = ai_old + y[i] * y[j] * (aj_old - aj);
        const double di = y[i] * (ai - ai_old);
        const double dj = y[j] * (aj - aj_old);

        const double b1 = bias - err[i] - di * gram(ii, ii) - dj * gram(ii, jj);
        const double b2 = bias - err[j] - di * gram(ii, jj) - dj * gram(jj, jj);
        double b_new = 0.0;
        if (ai > 0.0 && ai < c) {
            b_new = b1;
        } else if (aj > 0.0 && aj < c) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }
        const double db = b_new - bias;
        alpha[i] = ai;
        alpha[j] = aj;
        bias = b_new;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            err[k] += di * gram(ii, static_cast<Eigen::Index>(k)) +
                      dj * gram(jj, static_cast<Eigen::Index>(k)) + db;
        }
        return true;
    }

    bool examine(std::size_t i, double tol) {
        const double r = err[i] * y[i];
        const bool violated = (r < -tol && alpha[i] < c) || (r > tol && alpha[i] > 0.0);
        if (!violated) {
            return false;
        }
        // Partner candidates ordered by decreasing |error gap|.
        std::vector<std::size_t> order(pts.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            order[k] = k;
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(err[i] - err[a]) > std::abs(err[i] - err[b]);
        });
        for (std::size_t j : order) {
            if (take_step(i, j)) {
                return true;
            }
        }
        return false;
    }

    void solve() {
        constexpr double kTol = 1e-6;
        constexpr int kMaxSweeps = 2000;
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            std::size_t changed = 0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                changed += examine(i, kTol) ? 1 : 0;
            }
            if (changed == 0) {
                return;
            }
        }
        throw std::runtime_error("classifier optimization did not converge");
    }
};

} // namespace

SvmModel svm_train(std::span<const FeatureVector> features, std::span<const int> labels, double c,
                   double bandwidth) {
    if (features.size() != labels.size()) {
        throw std::invalid_argument("feature and label counts differ");
    }
    if (features.size() < 2) {
        throw std::invalid_argument("classification needs at least two training points");
    }
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("penalty C must be positive");
    }
    if (bandwidth < 0.0 || !std::isfinite(bandwidth)) {
        throw std::invalid_argument("bandwidth must be positive, or zero to autoselect");
    }
    check_features(features);

    SvmModel model;
    model.c = c;
    model.standardizer = Standardizer::fit(features);
    const double mean_var = 0.5 * (model.standardizer.scale[0] * model.standardizer.scale[0] +
                                   model.standardizer.scale[1] * model.standardizer.scale[1]);
    model.bandwidth_raw = bandwidth > 0.0 ? bandwidth : 2.0 * 2.0 * mean_var;
    model.bandwidth_std = model.bandwidth_raw / mean_var;

    std::vector<std::array<double, 2>> z(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        z[i] = model.standardizer.apply(features[i]);
    }

    model.classes.assign(labels.begin(), labels.end());
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
    if (model.classes.size() < 2) {
        throw std::invalid_argument("classification needs at least two classes");
    }

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            std::vector<std::array<double, 2>> pts;
            std::vector<double> y;
            for (std::size_t i = 0; i < features.size(); ++i) {
                if (labels[i] == model.classes[a]) {
                    pts.push_back(z[i]);
                    y.push_back(1.0);
                } else if (labels[i] == model.classes[b]) {
                    pts.push_back(z[i]);
                    y.push_back(-1.0);
                }
            }
            BinarySmo smo(pts, y, c, model.bandwidth_std);
            smo.solve();

            SvmModel::BinaryMachine machine;
            machine.class_a = model.classes[a];
            machine.class_b = model.classes[b];
            machine.bias = smo.bias;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (smo.alpha[i] > 1e-12 * c) {
                    machine.support.push_back(pts[i]);
                    machine.coeff.push_back(smo.alpha[i] * y[i]);
                }
            }
            model.machines.push_back(std::move(machine));
        }
    }
    return model;
}

int svm_predict(const SvmModel& model, const FeatureVector& x) {
    if (!std::isfinite(x.lambda) || !std::isfinite(x.omega)) {
        throw std::invalid_argument("query features must be finite");
    }
    const auto z = model.standardizer.apply(x);
    std::vector<int> votes(model.classes.size(), 0);
    for (const auto& machine : model.machines) {
        double decision = machine.bias;
        for (std::size_t i = 0; i < machine.support.size(); ++i) {
            decision += machine.coeff[i] * rbf(machine.support[i], z, model.bandwidth_std);
        }
        const int winner = decision >= 0.0 ? machine.class_a : machine.class_b;
        for (std::size_t k = 0; k < model.classes.size(); ++k) {
            if (model.classes[k] == winner) {
                ++votes[k];
                break;
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < votes.size(); ++k) {
        if (votes[k] > votes[best]) {
            best = k; // ties keep the lowest class id
        }
    }
    return model.classes[best];
}

} // namespace slosh
