#pragma once

#include "cuspfit/knots.hpp"
#include "cuspfit/types.hpp"

namespace cuspfit {

/// Tensor-product B-spline surface. The axial direction (parameter u) is
/// clamped/open; the circumferential direction (parameter v) is periodic by
/// default: its knot vector is unclamped-uniform and the first degree_circ
/// control columns are wrapped copies of the free columns, giving
/// C^(degree_circ-1) continuity across the seam. free_grid stores only the
/// free columns; wrapped aliases are materialized during evaluation.
struct SplineSurface {
  int degree_axial = 3;
  int degree_circ = 3;
  bool periodic_circ = true;
  KnotVector knots_axial;  // clamped, basis count == free_grid.rows
  KnotVector knots_circ;   // covers the wrapped basis count when periodic
  VecGrid free_grid;       // rows = n_axial, cols = n_circ_free

  int n_axial() const { return free_grid.rows; }
  int n_circ_free() const { return free_grid.cols; }
  /// Number of circumferential basis functions used in evaluation.
  int n_circ_wrapped() const {
    return periodic_circ ? free_grid.cols + degree_circ : free_grid.cols;
  }
  double circ_period() const {
    return knots_circ.domain_max() - knots_circ.domain_min();
  }
  /// Free column backing wrapped column j.
  int free_col(int wrapped_j) const {
    return periodic_circ ? wrapped_j % free_grid.cols : wrapped_j;
  }
  const Vec3& control(int i, int wrapped_j) const {
    return free_grid(i, free_col(wrapped_j));
  }

  /// Periodic surface over axial domain [axial_lo, axial_hi] and one
  /// circumferential period [0, period]; control points start at zero.
  static SplineSurface periodic(int degree_axial, int degree_circ,
                                int n_axial, int n_circ_free,
                                double axial_lo = 0.0, double axial_hi = 1.0,
                                double period = 1.0);

  /// Open (clamped x clamped) surface, no wrapping.
  static SplineSurface open(int degree_axial, int degree_circ, int n_axial,
                            int n_circ, double axial_lo = 0.0,
                            double axial_hi = 1.0, double circ_lo = 0.0,
                            double circ_hi = 1.0);

  /// Checks the structural invariants; throws ArgumentError on violation.
  void validate() const;
};

/// Basis data at one (u, v): values and first derivatives for the
/// (degree_axial+1) x (degree_circ+1) active control points.
struct SurfaceStencil {
  int row0 = 0;  // first active axial control row
  int col0 = 0;  // first active wrapped circumferential column
  std::vector<double> b_axial, d_axial;
  std::vector<double> b_circ, d_circ;
};

/// Wraps v into the base period when the surface is periodic; identity
/// otherwise. Non-finite v throws DomainError.
double wrap_circ(const SplineSurface& s, double v);

SurfaceStencil surface_stencil(const SplineSurface& s, double u, double v);

/// Point on the surface; u must lie in the clamped axial domain, v is
/// wrapped periodically (or domain-checked when the surface is open).
Vec3 surface_point(const SplineSurface& s, double u, double v);

/// Mixed partial derivative of order (du, dv), each in [0, degree].
Vec3 surface_partial(const SplineSurface& s, double u, double v, int du,
                     int dv);

/// Dense grid of basis-product weights w_ij = dS(u,v)/dP_ij (one scalar per
/// free control point; wrapped aliases accumulate onto their free column).
/// The grid sums to 1 and has at most (p+1)(q+1) non-zero entries.
ScalarGrid control_sensitivity(const SplineSurface& s, double u, double v);

}  // namespace cuspfit
