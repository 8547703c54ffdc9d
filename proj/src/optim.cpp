/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slosh {

namespace {

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

} // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options) {
    const std::size_t dim = x0.size();
    if (dim == 0 || steps.size() != dim) {
        throw std::invalid_argument("nelder_mead: dimension mismatch");
    }

    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : 1e300;
    };

    std::vector<Vertex> simplex(dim + 1);
    simplex[0].x.assign(x0.begin(), x0.end());
    simplex[0].f = eval(simplex[0].x);
    for (std::size_t d = 0; d < dim; ++d) {
        simplex[d + 1].x = simplex[0].x;
        simplex[d + 1].x[d] += steps[d] != 0.0 ? steps[d] : 1e-4;
        simplex[d + 1].f = eval(simplex[d + 1].x);
    }

    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    order();

    std::vector<double> xscale(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        xscale[d] = std::abs(steps[d] != 0.0 ? steps[d] : 1e-4);
    }
    auto simplex_small = [&] {
        for (std::size_t v = 1; v <= dim; ++v) {
            for (std::size_t d = 0; d < dim; ++d) {
                if (std::abs(simplex[v].x[d] - simplex[0].x[d]) > options.xtol * xscale[d]) {
                    return false;
                }
            }
        }
        return true;
    };

    std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
    for (res.iterations = 0; res.iterations < options.max_iters; ++res.iterations) {
        const double fbest = simplex.front().f;
        const double fworst = simplex.back().f;
        if (fworst - fbest <= options.tol * (std::abs(fbest) + options.tol) && simplex_small()) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < dim; ++v) {
            for (std::size_t d = 0; d < dim; ++d) {
                centroid[d] += simplex[v].x[d];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(dim);
        }

        const Vertex& worst = simplex.back();
        for (std::size_t d = 0; d < dim; ++d) {
            xr[d] = centroid[d] + (centroid[d] - worst.x[d]);
        }
        const double fr = eval(xr);

        if (fr < simplex.front().f) {
            for (std::size_t d = 0; d < dim; ++d) {
                xe[d] = centroid[d] + 2.0 * (centroid[d] - worst.x[d]);
            }
            const double fe = eval(xe);
            if (fe < fr) {
                simplex.back().x = xe;
                simplex.back().f = fe;
            } else {
                simplex.back().x = xr;
                simplex.back().f = fr;
            }
        } else if (fr < simplex[dim - 1].f) {
            simplex.back().x = xr;
            simplex.back().f = fr;
        } else {
            const bool outside = fr < worst.f;
            const std::vector<double>& toward = outside ? xr : worst.x;
            const double f_toward = outside ? fr : worst.f;
            for (std::size_t d = 0; d < dim; ++d) {
                xc[d] = centroid[d] + 0.5 * (toward[d] - centroid[d]);
            }
            const double fc = eval(xc);
            if (fc < f_toward) {
                simplex.back().x = xc;
                simplex.back().f = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t v = 1; v <= dim; ++v) {
                    for (std::size_t d = 0; d < dim; ++d) {
                        simplex[v].x[d] =
                            simplex[0].x[d] + 0.5 * (simplex[v].x[d] - simplex[0].x[d]);
                    }
                    simplex[v].f = eval(simplex[v].x);
                }
            }
        }
        order();
    }

    res.x = simplex.front().x;
    res.value = simplex.front().f;
    return res;
}

} // namespace slosh
