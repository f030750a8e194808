#include "cuspfit/geometry.hpp"

#include <cmath>
#include <limits>

#include "gauss.hpp"
#include "parallel.hpp"

namespace cuspfit {

namespace {
constexpr double kDegenTol = 1e-12;

// The tangent pair is degenerate when the parallelogram it spans is
// vanishingly small relative to the tangent magnitudes. The relative form
// keeps detection scale-invariant: a control ring collapsed to a point is
// flagged regardless of how large its coordinates are.
bool degenerate_tangents(const Vec3& tu, const Vec3& tv, const Vec3& cross) {
  return cross.norm() <= kDegenTol * (tu.squaredNorm() + tv.squaredNorm());
}
}

Eigen::Matrix<double, 2, 3> surface_jacobian(const SplineSurface& s, double u,
                                             double v) {
  Eigen::Matrix<double, 2, 3> J;
  J.row(0) = surface_partial(s, u, v, 1, 0).transpose();
  J.row(1) = surface_partial(s, u, v, 0, 1).transpose();
  return J;
}

Vec3 unit_normal(const SplineSurface& s, double u, double v) {
  const Eigen::Matrix<double, 2, 3> J = surface_jacobian(s, u, v);
  const Vec3 tu = J.row(0);
  const Vec3 tv = J.row(1);
  const Vec3 c = tu.cross(tv);
  if (degenerate_tangents(tu, tv, c))
    throw DegeneracyError("degenerate tangents: |t_u x t_v| vanishes", u, v);
  return c / c.norm();
}

SampleGrid::SampleGrid(const SplineSurface& s, int n_u, int n_v) {
  if (n_u < 2 || n_v < 3)
    throw ArgumentError("sample grid needs n_u >= 2 and n_v >= 3");
  n_u_ = n_u;
  n_v_ = n_v;

  const double ulo = s.knots_axial.domain_min();
  const double uhi = s.knots_axial.domain_max();
  u_params_.resize(n_u);
  for (int i = 0; i < n_u; ++i)
    u_params_[i] =
        (i == n_u - 1) ? uhi : ulo + (uhi - ulo) * i / (n_u - 1);

  const double vlo = s.knots_circ.domain_min();
  const double vhi = s.knots_circ.domain_max();
  v_params_.resize(n_v);
  if (s.periodic_circ) {
    const double period = vhi - vlo;
    for (int j = 0; j < n_v; ++j) v_params_[j] = vlo + period * j / n_v;
  } else {
    for (int j = 0; j < n_v; ++j)
      v_params_[j] =
          (j == n_v - 1) ? vhi : vlo + (vhi - vlo) * j / (n_v - 1);
  }

  u_stations_.resize(n_u);
  for (int i = 0; i < n_u; ++i) {
    const BasisDerivatives b = basis_derivatives(s.knots_axial, u_params_[i], 1);
    u_stations_[i] = {b.span - s.degree_axial, b.rows[0], b.rows[1]};
  }
  v_stations_.resize(n_v);
  for (int j = 0; j < n_v; ++j) {
    const BasisDerivatives b = basis_derivatives(s.knots_circ, v_params_[j], 1);
    v_stations_[j] = {b.span - s.degree_circ, b.rows[0], b.rows[1]};
  }
}

SurfaceSamples SampleGrid::evaluate(const SplineSurface& s,
                                    int threads) const {
  const std::size_t m = size();
  SurfaceSamples out;
  out.n_u = n_u_;
  out.n_v = n_v_;
  out.params.resize(m);
  out.points.resize(m);
  out.tangent_u.resize(m);
  out.tangent_v.resize(m);
  out.normals.resize(m);
  out.boundary.assign(m, 0);
  out.degenerate.assign(m, 0);

  parallel_for(m, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const int a = static_cast<int>(k) / n_v_;
      const int c = static_cast<int>(k) % n_v_;
      const Station& su = u_stations_[a];
      const Station& sv = v_stations_[c];
      const int p = static_cast<int>(su.values.size()) - 1;
      const int q = static_cast<int>(sv.values.size()) - 1;

      Vec3 pt = Vec3::Zero(), tu = Vec3::Zero(), tv = Vec3::Zero();
      for (int i = 0; i <= p; ++i) {
        Vec3 row = Vec3::Zero(), drow = Vec3::Zero();
        for (int j = 0; j <= q; ++j) {
          const Vec3& P = s.control(su.first + i, sv.first + j);
          row += sv.values[j] * P;
          drow += sv.derivs[j] * P;
        }
        pt += su.values[i] * row;
        tu += su.derivs[i] * row;
        tv += su.values[i] * drow;
      }

      out.params[k] = {u_params_[a], v_params_[c]};
      out.points[k] = pt;
      out.tangent_u[k] = tu;
      out.tangent_v[k] = tv;
      out.boundary[k] = (a == 0) ? 1 : 0;
      const Vec3 cr = tu.cross(tv);
      if (degenerate_tangents(tu, tv, cr)) {
        out.degenerate[k] = 1;
        out.normals[k] = Vec3::Zero();
      } else {
        out.normals[k] = cr / cr.norm();
      }
    }
  });

  for (std::size_t k = 0; k < m; ++k)
    out.degenerate_count += out.degenerate[k];
  return out;
}

SurfaceSamples sample_surface(const SplineSurface& s, int n_u, int n_v,
                              int threads) {
  return SampleGrid(s, n_u, n_v).evaluate(s, threads);
}

double surface_area(const SplineSurface& s, int quad_order) {
  if (quad_order < 2 || quad_order > 16)
    throw ArgumentError("quadrature order must be in [2, 16]");
  const GaussRule& rule = gauss_rule(quad_order);

  auto spans = [](const KnotVector& kv) {
    std::vector<std::pair<double, double>> out;
    const int n = kv.basis_count();
    for (int i = kv.degree; i < n; ++i)
      if (kv.values[i] < kv.values[i + 1])
        out.emplace_back(kv.values[i], kv.values[i + 1]);
    return out;
  };

  const auto uspans = spans(s.knots_axial);
  const auto vspans = spans(s.knots_circ);

  double area = 0.0;
  for (const auto& [ua, ub] : uspans) {
    for (const auto& [va, vb] : vspans) {
      const double ju = 0.5 * (ub - ua);
      const double jv = 0.5 * (vb - va);
      double cell = 0.0;
      for (int i = 0; i < quad_order; ++i) {
        const double u = 0.5 * (ua + ub) + ju * rule.nodes[i];
        for (int j = 0; j < quad_order; ++j) {
          const double v = 0.5 * (va + vb) + jv * rule.nodes[j];
          const Vec3 tu = surface_partial(s, u, v, 1, 0);
          const Vec3 tv = surface_partial(s, u, v, 0, 1);
          cell += rule.weights[i] * rule.weights[j] * tu.cross(tv).norm();
        }
      }
      area += cell * ju * jv;
    }
  }
  return area;
}

double min_nonneighbor_distance(const SurfaceSamples& samples, int window) {
  const int nu = samples.n_u, nv = samples.n_v;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nu * nv; ++k) {
    const int ai = k / nv, ci = k % nv;
    for (int l = k + 1; l < nu * nv; ++l) {
      const int aj = l / nv, cj = l % nv;
      const int da = std::abs(ai - aj);
      int dc = std::abs(ci - cj);
      dc = std::min(dc, nv - dc);  // cyclic
      if (da <= window && dc <= window) continue;
      const double d = (samples.points[k] - samples.points[l]).norm();
      best = std::min(best, d);
    }
  }
  return best;
}

}  // namespace cuspfit
