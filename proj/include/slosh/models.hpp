/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <vector>

namespace slosh {

/// The two physics features every property model consumes.
struct FeatureVector {
    double lambda = 0.0; ///< decay rate (1/s)
    double omega = 0.0;  ///< oscillation frequency (rad/s)
};

/// Ground-truth annotations; any subset may be present depending on task.
struct LiquidLabel {
    std::optional<double> h;  ///< liquid height (mm)
    std::optional<double> c;  ///< sugar concentration (wt%)
    std::optional<double> mu; ///< log10 kinematic viscosity (cSt)
    std::optional<int> class_id;
};

/// log10 of kinematic viscosity; the regression target for viscosity.
double viscosity_to_mu(double nu_cst);

/// Per-dimension affine map to zero mean, unit variance.
struct Standardizer {
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 2> scale{1.0, 1.0}; // standard deviations, >= tiny floor

    static Standardizer fit(std::span<const FeatureVector> features);
    std::array<double, 2> apply(const FeatureVector& f) const {
        return {(f.lambda - mean[0]) / scale[0], (f.omega - mean[1]) / scale[1]};
    }
};

/// Gaussian process regressor, RBF kernel with per-dimension length-scales
/// plus a white-noise kernel. Hyperparameters picked by multi-start
/// maximization of the log marginal likelihood; fully deterministic.
struct GprModel {
    Standardizer standardizer;
    Eigen::MatrixXd x; ///< standardized training inputs, n x 2
    Eigen::VectorXd y; ///< raw training targets
    double y_mean = 0.0;
    double ell1 = 1.0, ell2 = 1.0; ///< length-scales (standardized units)
    double sigma_f2 = 1.0;         ///< signal variance
    double sigma_n2 = 1e-6;        ///< white-noise variance
    Eigen::MatrixXd chol_lower;    ///< Cholesky factor of K = RBF + noise I
    Eigen::VectorXd alpha;         ///< K^{-1} (y - y_mean)
    double log_marginal = 0.0;
};

struct GprPrediction {
    double mean = 0.0;
    double std = 0.0; ///< includes the learned observation noise
};

GprModel gpr_train(std::span<const FeatureVector> features, std::span<const double> targets);
GprPrediction gpr_predict(const GprModel& model, const FeatureVector& x);
/// Posterior mean only; cheaper than gpr_predict when the uncertainty is unused.
double gpr_predict_mean(const GprModel& model, const FeatureVector& x);
/// Rebuild chol_lower and alpha from the stored inputs and hyperparameters;
/// used after deserialization. Throws std::runtime_error on a singular kernel.
void gpr_refactor(GprModel& model);

/// Ordinary least squares over the basis {1, lambda, omega, lambda^2,
/// lambda*omega, omega^2}, in raw feature units so coefficients keep their
/// physical meaning.
struct QuadModel {
    std::array<double, 6> coeff{};
};

QuadModel quad_fit(std::span<const FeatureVector> features, std::span<const double> targets);
double quad_predict(const QuadModel& model, const FeatureVector& x);

/// One-vs-one soft-margin SVM with an RBF kernel k = exp(-|dx|^2 / w).
/// The bandwidth w is given in raw feature units; internally features are
/// standardized and w is rescaled by the mean feature variance, so scaling
/// all features by s together with w by s^2 changes nothing.
struct SvmModel {
    struct BinaryMachine {
        int class_a = 0, class_b = 0; ///< +1 side, -1 side
        std::vector<std::array<double, 2>> support; ///< standardized inputs
        std::vector<double> coeff;                  ///< alpha_i * y_i
        double bias = 0.0;
    };
    Standardizer standardizer;
    double bandwidth_raw = 0.0;
    double bandwidth_std = 0.0; ///< w after the variance rescale
    double c = 10.0;
    std::vector<int> classes; ///< ascending
    std::vector<BinaryMachine> machines;
};

/// bandwidth = 0 selects the default w = 2 * d * mean feature variance
/// (equivalently gamma = 1 / (2 d var)).
SvmModel svm_train(std::span<const FeatureVector> features, std::span<const int> labels,
                   double c = 10.0, double bandwidth = 0.0);
int svm_predict(const SvmModel& model, const FeatureVector& x);

} // namespace slosh
