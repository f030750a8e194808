#pragma once

#include <cmath>
#include <optional>

#include "cuspfit/losses.hpp"
#include "cuspfit/nearest.hpp"

namespace cuspfit::detail {

constexpr double kTpeCap = 1e30;
constexpr double kCoincident2 = 1e-24;

/// Canonical per-pair tangent-point ratio; shared by value and gradient
/// paths so accelerated and brute evaluations agree bitwise.
inline double tpe_pair(const Vec3& sk, const Vec3& nk, const Vec3& sl,
                       double alpha, bool* capped) {
  const Vec3 d = sk - sl;
  const double d2 = d.squaredNorm();
  if (d2 <= kCoincident2) {
    if (capped) *capped = true;
    return kTpeCap;
  }
  const double g = std::abs(nk.dot(d));
  return std::pow(g, alpha) / std::pow(d2, alpha);
}

/// Argmin/argmax bookkeeping of one loss evaluation, consumed by the
/// analytic gradient. Indices refer to flattened sample order and cloud
/// order; ties follow the documented deterministic rules.
struct TermInfo {
  std::vector<Nearest> cd_nn;     // per cloud point, nearest sample
  double hd = 0.0;
  bool hd_from_samples = true;    // argmax branch: samples->cloud
  int hd_s = -1, hd_q = -1;       // sample / cloud index of the active pair
  std::vector<int> bnd_ids;       // boundary-row sample indices
  std::vector<Vec3> ann_pts;      // annulus-labeled cloud points
  std::vector<Nearest> ann_s2a;   // per boundary sample, nearest annulus pt
  std::vector<Nearest> ann_a2s;   // per annulus pt, nearest boundary sample
                                  // (index into bnd_ids)
  int tpe_k = -1, tpe_l = -1;
  bool tpe_capped = false;
  double nz_mean = 0.0;
  int norm_k = -1;
  int norm_count = 0;
};

double chamfer_one_sided_info(const SurfaceSamples& samples,
                              const PointCloud& cloud, int threads,
                              TermInfo* info);
double hausdorff_info(const SurfaceSamples& samples, const PointCloud& cloud,
                      int threads, TermInfo* info);
double annulus_info(const SurfaceSamples& samples, const PointCloud& cloud,
                    int threads, TermInfo* info);
double tpe_info(const SurfaceSamples& samples, double alpha, int threads,
                TermInfo* info);
double normdev_info(const SurfaceSamples& samples, TermInfo* info);

/// Evaluates the active terms for `weights`, filling `info` when non-null.
LossBreakdown evaluate_terms(const SurfaceSamples& samples,
                             const PointCloud& cloud,
                             const LossWeights& weights, int threads,
                             TermInfo* info);

}  // namespace cuspfit::detail
