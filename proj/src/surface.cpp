#include "cuspfit/surface.hpp"

#include <cmath>
#include <string>

namespace cuspfit {

SplineSurface SplineSurface::periodic(int degree_axial, int degree_circ,
                                      int n_axial, int n_circ_free,
                                      double axial_lo, double axial_hi,
                                      double period) {
  if (n_circ_free < degree_circ + 1)
    throw ArgumentError("periodic surface needs n_circ_free >= degree_circ + 1");
  SplineSurface s;
  s.degree_axial = degree_axial;
  s.degree_circ = degree_circ;
  s.periodic_circ = true;
  s.knots_axial = make_knots(KnotKind::clamped, n_axial, degree_axial,
                             axial_lo, axial_hi);
  s.knots_circ = make_knots(KnotKind::unclamped_uniform,
                            n_circ_free + degree_circ, degree_circ, 0.0,
                            period);
  s.free_grid = VecGrid(n_axial, n_circ_free);
  s.validate();
  return s;
}

SplineSurface SplineSurface::open(int degree_axial, int degree_circ,
                                  int n_axial, int n_circ, double axial_lo,
                                  double axial_hi, double circ_lo,
                                  double circ_hi) {
  SplineSurface s;
  s.degree_axial = degree_axial;
  s.degree_circ = degree_circ;
  s.periodic_circ = false;
  s.knots_axial = make_knots(KnotKind::clamped, n_axial, degree_axial,
                             axial_lo, axial_hi);
  s.knots_circ =
      make_knots(KnotKind::clamped, n_circ, degree_circ, circ_lo, circ_hi);
  s.free_grid = VecGrid(n_axial, n_circ);
  s.validate();
  return s;
}

void SplineSurface::validate() const {
  if (degree_axial < 1 || degree_circ < 1)
    throw ArgumentError("surface degrees must be >= 1");
  if (knots_axial.degree != degree_axial ||
      knots_circ.degree != degree_circ)
    throw ArgumentError("knot vector degrees disagree with surface degrees");
  if (knots_axial.kind != KnotKind::clamped)
    throw ArgumentError("axial knot vector must be clamped");
  if (knots_axial.basis_count() != free_grid.rows)
    throw ArgumentError("axial basis count " +
                        std::to_string(knots_axial.basis_count()) +
                        " != control rows " + std::to_string(free_grid.rows));
  if (periodic_circ) {
    if (knots_circ.kind != KnotKind::unclamped_uniform)
      throw ArgumentError(
          "periodic circumferential knot vector must be unclamped-uniform");
    if (knots_circ.basis_count() != free_grid.cols + degree_circ)
      throw ArgumentError(
          "circumferential basis count must equal free columns + degree");
    if (free_grid.cols < degree_circ + 1)
      throw ArgumentError("free columns must be >= degree_circ + 1");
  } else {
    if (knots_circ.basis_count() != free_grid.cols)
      throw ArgumentError(
          "circumferential basis count != control columns");
  }
  for (const auto& p : free_grid.data)
    if (!p.allFinite())
      throw ArgumentError("control points must be finite");
}

double wrap_circ(const SplineSurface& s, double v) {
  if (!std::isfinite(v)) throw DomainError("circumferential parameter not finite");
  if (!s.periodic_circ) return v;
  const double lo = s.knots_circ.domain_min();
  const double period = s.circ_period();
  double w = v - period * std::floor((v - lo) / period);
  if (w >= lo + period) w = lo;  // guards rounding at the seam
  return w;
}

SurfaceStencil surface_stencil(const SplineSurface& s, double u, double v) {
  const double vw = wrap_circ(s, v);
  const BasisDerivatives bu = basis_derivatives(s.knots_axial, u, 1);
  const BasisDerivatives bv = basis_derivatives(s.knots_circ, vw, 1);
  SurfaceStencil st;
  st.row0 = bu.span - s.degree_axial;
  st.col0 = bv.span - s.degree_circ;
  st.b_axial = bu.rows[0];
  st.d_axial = bu.rows[1];
  st.b_circ = bv.rows[0];
  st.d_circ = bv.rows[1];
  return st;
}

Vec3 surface_point(const SplineSurface& s, double u, double v) {
  const double vw = wrap_circ(s, v);
  const BasisSpan bu = basis_values(s.knots_axial, u);
  const BasisSpan bv = basis_values(s.knots_circ, vw);
  const int row0 = bu.span - s.degree_axial;
  const int col0 = bv.span - s.degree_circ;

  Vec3 out = Vec3::Zero();
  for (int i = 0; i <= s.degree_axial; ++i) {
    Vec3 row = Vec3::Zero();
    for (int j = 0; j <= s.degree_circ; ++j)
      row += bv.values[j] * s.control(row0 + i, col0 + j);
    out += bu.values[i] * row;
  }
  return out;
}

Vec3 surface_partial(const SplineSurface& s, double u, double v, int du,
                     int dv) {
  if (du < 0 || dv < 0 || du > s.degree_axial || dv > s.degree_circ)
    throw ArgumentError("partial derivative order out of range");
  const double vw = wrap_circ(s, v);
  const BasisDerivatives bu = basis_derivatives(s.knots_axial, u, du);
  const BasisDerivatives bv = basis_derivatives(s.knots_circ, vw, dv);
  const int row0 = bu.span - s.degree_axial;
  const int col0 = bv.span - s.degree_circ;

  Vec3 out = Vec3::Zero();
  for (int i = 0; i <= s.degree_axial; ++i) {
    Vec3 row = Vec3::Zero();
    for (int j = 0; j <= s.degree_circ; ++j)
      row += bv.rows[dv][j] * s.control(row0 + i, col0 + j);
    out += bu.rows[du][i] * row;
  }
  return out;
}

ScalarGrid control_sensitivity(const SplineSurface& s, double u, double v) {
  const SurfaceStencil st = surface_stencil(s, u, v);
  ScalarGrid g(s.n_axial(), s.n_circ_free());
  for (int i = 0; i <= s.degree_axial; ++i)
    for (int j = 0; j <= s.degree_circ; ++j)
      g(st.row0 + i, s.free_col(st.col0 + j)) +=
          st.b_axial[i] * st.b_circ[j];
  return g;
}

}  // namespace cuspfit
