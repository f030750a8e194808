#include "cuspfit/gradients.hpp"

#include <cmath>

#include "loss_detail.hpp"

namespace cuspfit {

namespace {

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::pair<LossBreakdown, GradientGrid> loss_gradient(
    const SplineSurface& surface, const PointCloud& cloud,
    const LossWeights& weights, const SampleGrid& grid, int threads) {
  if (cloud.size() == 0) throw ArgumentError("empty point cloud");
  weights.validate();

  const SurfaceSamples samples = grid.evaluate(surface, threads);
  detail::TermInfo info;
  const LossBreakdown breakdown =
      detail::evaluate_terms(samples, cloud, weights, threads, &info);

  const std::size_t m = samples.size();
  std::vector<Vec3> ds(m, Vec3::Zero());
  std::vector<Vec3> dtu(m, Vec3::Zero());
  std::vector<Vec3> dtv(m, Vec3::Zero());
  std::vector<Vec3> dn(m, Vec3::Zero());

  // One-sided Chamfer: each cloud point pulls its nearest sample.
  if (weights.w_cd > 0.0) {
    const double c = weights.w_cd * 2.0 / static_cast<double>(cloud.size());
    for (std::size_t l = 0; l < cloud.size(); ++l) {
      const int k = info.cd_nn[l].index;
      ds[k] += c * (samples.points[k] - cloud.points[l]);
    }
  }

  // Hausdorff: subgradient through the active directed pair.
  if (weights.w_hd > 0.0 && info.hd_s >= 0) {
    const Vec3 diff = samples.points[info.hd_s] - cloud.points[info.hd_q];
    const double d = diff.norm();
    if (d > 1e-12) ds[info.hd_s] += weights.w_hd * diff / d;
  }

  // Annulus term: symmetric Chamfer between boundary row and annulus points.
  if (weights.w_a > 0.0 && !info.ann_pts.empty()) {
    const double nb = static_cast<double>(info.bnd_ids.size());
    const double na = static_cast<double>(info.ann_pts.size());
    for (std::size_t i = 0; i < info.bnd_ids.size(); ++i) {
      const int k = info.bnd_ids[i];
      const Vec3& a = info.ann_pts[info.ann_s2a[i].index];
      ds[k] += weights.w_a * (2.0 / nb) * (samples.points[k] - a);
    }
    for (std::size_t j = 0; j < info.ann_pts.size(); ++j) {
      const int k = info.bnd_ids[info.ann_a2s[j].index];
      ds[k] += weights.w_a * (2.0 / na) * (samples.points[k] - info.ann_pts[j]);
    }
  }

  // Orthogonality: d|cos|/dt through the normalized dot product.
  if (weights.w_orth > 0.0) {
    int count = 0;
    for (std::size_t k = 0; k < m; ++k)
      if (!samples.degenerate[k]) ++count;
    const double scale = weights.w_orth / static_cast<double>(count);
    for (std::size_t k = 0; k < m; ++k) {
      if (samples.degenerate[k]) continue;
      const Vec3& tu = samples.tangent_u[k];
      const Vec3& tv = samples.tangent_v[k];
      const double nu = tu.norm(), nv = tv.norm();
      const double inv = 1.0 / (nu * nv);
      const double cosv = tu.dot(tv) * inv;
      const double s = sign_of(cosv);
      if (s == 0.0) continue;
      dtu[k] += (scale * s) * (tv * inv - cosv * tu / (nu * nu));
      dtv[k] += (scale * s) * (tu * inv - cosv * tv / (nv * nv));
    }
  }

  // Tangent-point energy: active ordered pair only.
  if (weights.w_tpe > 0.0 && info.tpe_k >= 0 && !info.tpe_capped) {
    const double alpha = weights.tpe_alpha;
    const int k = info.tpe_k, l = info.tpe_l;
    const Vec3 d = samples.points[k] - samples.points[l];
    const double d2 = d.squaredNorm();
    const double g = samples.normals[k].dot(d);
    const double ag = std::abs(g);
    const double inv_d2a = 1.0 / std::pow(d2, alpha);
    const double r = std::pow(ag, alpha) * inv_d2a;
    const double dnum =
        (ag > 0.0) ? alpha * std::pow(ag, alpha - 1.0) * sign_of(g) * inv_d2a
                   : 0.0;
    const Vec3 dr_dd = dnum * samples.normals[k] - (2.0 * alpha * r / d2) * d;
    ds[k] += weights.w_tpe * dr_dd;
    ds[l] -= weights.w_tpe * dr_dd;
    dn[k] += weights.w_tpe * dnum * d;
  }

  // Normal deviation: the argmax z-deviation against the mean.
  if (weights.w_norm > 0.0 && info.norm_k >= 0) {
    const double s =
        sign_of(samples.normals[info.norm_k][2] - info.nz_mean);
    if (s != 0.0) {
      const double invK = 1.0 / static_cast<double>(info.norm_count);
      for (std::size_t k = 0; k < m; ++k) {
        if (samples.degenerate[k]) continue;
        const double delta =
            (static_cast<int>(k) == info.norm_k) ? 1.0 : 0.0;
        dn[k][2] += weights.w_norm * s * (delta - invK);
      }
    }
  }

  // Pull normal cotangents back through n = (t_u x t_v)/|t_u x t_v|.
  for (std::size_t k = 0; k < m; ++k) {
    if (samples.degenerate[k] || dn[k].isZero()) continue;
    const Vec3& tu = samples.tangent_u[k];
    const Vec3& tv = samples.tangent_v[k];
    const Vec3 c = tu.cross(tv);
    const double cn = c.norm();
    const Vec3& n = samples.normals[k];
    const Vec3 dc = (dn[k] - n * n.dot(dn[k])) / cn;
    dtu[k] += tv.cross(dc);
    dtv[k] += dc.cross(tu);
  }

  // Scatter through the control sensitivities onto free columns.
  GradientGrid grad(surface.n_axial(), surface.n_circ_free());
  for (std::size_t k = 0; k < m; ++k) {
    if (ds[k].isZero() && dtu[k].isZero() && dtv[k].isZero()) continue;
    grid.for_each_weight(surface, k,
                         [&](int row, int col, double w, double wu, double wv) {
                           grad(row, col) +=
                               ds[k] * w + dtu[k] * wu + dtv[k] * wv;
                         });
  }
  return {breakdown, grad};
}

std::pair<LossBreakdown, GradientGrid> loss_gradient(
    const SplineSurface& surface, const PointCloud& cloud,
    const LossWeights& weights, int n_u, int n_v, int threads) {
  const SampleGrid grid(surface, n_u, n_v);
  return loss_gradient(surface, cloud, weights, grid, threads);
}

GradientGrid finite_difference_gradient(const SplineSurface& surface,
                                        const PointCloud& cloud,
                                        const LossWeights& weights, int n_u,
                                        int n_v, double step) {
  if (!(step >= 1e-7 && step <= 1e-3))
    throw ArgumentError("finite difference step must be in [1e-7, 1e-3]");
  SplineSurface work = surface;
  GradientGrid grad(surface.n_axial(), surface.n_circ_free());
  for (int i = 0; i < work.free_grid.rows; ++i) {
    for (int j = 0; j < work.free_grid.cols; ++j) {
      for (int c = 0; c < 3; ++c) {
        const double saved = work.free_grid(i, j)[c];
        work.free_grid(i, j)[c] = saved + step;
        const double lp = total_loss(work, cloud, weights, n_u, n_v).total;
        work.free_grid(i, j)[c] = saved - step;
        const double lm = total_loss(work, cloud, weights, n_u, n_v).total;
        work.free_grid(i, j)[c] = saved;
        grad(i, j)[c] = (lp - lm) / (2.0 * step);
      }
    }
  }
  return grad;
}

}  // namespace cuspfit
