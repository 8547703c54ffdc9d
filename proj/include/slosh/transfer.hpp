/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include "slosh/models.hpp"

#include <span>
#include <variant>

namespace slosh {

/// Any single-target property regressor eligible as a transfer base.
using Regressor = std::variant<GprModel, QuadModel>;

/// Posterior/fitted mean of the underlying regressor.
double regressor_mean(const Regressor& model, const FeatureVector& x);

/// Affine feature warp carrying a container-A model over to container B:
/// prediction(x) = base(alpha1*lambda + alpha2, beta1*omega + beta2).
struct TransferMap {
    double alpha1 = 1.0, alpha2 = 0.0; ///< lambda warp, alpha1 > 0
    double beta1 = 1.0, beta2 = 0.0;   ///< omega warp, beta1 > 0
    Regressor base;

    FeatureVector warp(const FeatureVector& f) const {
        return {alpha1 * f.lambda + alpha2, beta1 * f.omega + beta2};
    }
};

/// Fits the four warp parameters to tuning pairs from the new container by
/// minimizing mean squared prediction error, searching from the identity
/// map. The returned map never has higher tuning MSE than the identity.
TransferMap transfer_fit(Regressor base, std::span<const FeatureVector> features,
                         std::span<const double> targets);

double transfer_predict(const TransferMap& map, const FeatureVector& x);

} // namespace slosh
