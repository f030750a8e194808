#pragma once

#include <span>

#include "cuspfit/geometry.hpp"
#include "cuspfit/point_cloud.hpp"

namespace cuspfit {

/// Weights of the composite fitting loss
///   L = w_cd*d_CD + w_hd*d_HD + w_a*d_a
///     + w_orth*R_orth + w_tpe*R_TPE + w_norm*R_norm.
/// Terms with zero weight are skipped and reported as 0. All weights must
/// be non-negative and tpe_alpha >= 1.
struct LossWeights {
  double w_cd = 0.0;
  double w_hd = 0.0;
  double w_a = 0.0;
  double w_orth = 0.0;
  double w_tpe = 0.0;
  double w_norm = 0.0;
  double tpe_alpha = 4.0;

  void validate() const;

  /// Weights used for the synthetic validation studies.
  static LossWeights validation() {
    return {80.0, 30.0, 0.0, 5.0, 1e-7, 2.0, 4.0};
  }
};

/// Per-term values of one loss evaluation. fidelity and regularization are
/// the weighted partial sums; total = fidelity + regularization.
struct LossBreakdown {
  double total = 0.0;
  double fidelity = 0.0;
  double regularization = 0.0;
  double d_cd = 0.0;
  double d_hd = 0.0;
  double d_a = 0.0;
  double r_orth = 0.0;
  double r_tpe = 0.0;
  double r_norm = 0.0;
  int degenerate_samples = 0;
  bool tpe_capped = false;
};

/// Mean over cloud points of the squared distance to the nearest sample.
double chamfer_one_sided(const SurfaceSamples& samples,
                         const PointCloud& cloud, int threads = 1);

/// Symmetric Chamfer: mean-of-squared nearest distances in both
/// directions, summed.
double chamfer_symmetric(std::span<const Vec3> a, std::span<const Vec3> b,
                         int threads = 1);

/// Symmetric Hausdorff distance (unsquared) between samples and cloud.
double hausdorff(const SurfaceSamples& samples, const PointCloud& cloud,
                 int threads = 1);

/// Symmetric Chamfer between the annulus-edge sample row and the
/// annulus-labeled cloud points; 0 when the cloud has no annulus labels.
double annulus_loss(const SurfaceSamples& samples, const PointCloud& cloud,
                    int threads = 1);

/// Mean |cos angle(t_u, t_v)| over non-degenerate samples.
double orthogonality_energy(const SurfaceSamples& samples);

/// Tangent-point energy: max over ordered pairs (k, l), k != l, of
/// |n_k . (s_k - s_l)|^alpha / |s_k - s_l|^(2 alpha). Boundary-row and
/// degenerate samples are excluded. Coincident pairs hit a large finite
/// cap instead of overflowing.
double tangent_point_energy(const SurfaceSamples& samples, double alpha,
                            int threads = 1);

/// Max over samples of |n_z - mean(n_z)| (non-degenerate samples).
double normal_deviation_energy(const SurfaceSamples& samples);

/// Full loss at `surface` sampled on an (n_u x n_v) parameter grid.
LossBreakdown total_loss(const SplineSurface& surface,
                         const PointCloud& cloud, const LossWeights& weights,
                         int n_u = 40, int n_v = 120, int threads = 1);

}  // namespace cuspfit
