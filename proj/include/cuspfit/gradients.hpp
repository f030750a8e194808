#pragma once

#include <utility>

#include "cuspfit/losses.hpp"

namespace cuspfit {

using GradientGrid = VecGrid;

/// Analytic gradient of the total loss with respect to the free control
/// points, together with the loss breakdown of the same evaluation.
/// Min/max assignments (nearest neighbors, Hausdorff/TPE/normal argmax)
/// are frozen at their current values, giving the standard subgradient;
/// they are recomputed on every call. Wrapped circumferential columns
/// accumulate onto their free alias.
std::pair<LossBreakdown, GradientGrid> loss_gradient(
    const SplineSurface& surface, const PointCloud& cloud,
    const LossWeights& weights, int n_u = 40, int n_v = 120, int threads = 1);

/// Same, reusing a prebuilt sampling plan (knots must match `surface`).
std::pair<LossBreakdown, GradientGrid> loss_gradient(
    const SplineSurface& surface, const PointCloud& cloud,
    const LossWeights& weights, const SampleGrid& grid, int threads = 1);

/// Central finite differences of total_loss per control coordinate.
/// Step must lie in [1e-7, 1e-3]; throws ArgumentError otherwise.
GradientGrid finite_difference_gradient(const SplineSurface& surface,
                                        const PointCloud& cloud,
                                        const LossWeights& weights,
                                        int n_u = 40, int n_v = 120,
                                        double step = 1e-5);

}  // namespace cuspfit
