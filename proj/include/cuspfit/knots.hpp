#pragma once

#include <vector>

#include "cuspfit/errors.hpp"

namespace cuspfit {

enum class KnotKind {
  clamped,            ///< open knot vector, end knots repeated degree+1 times
  unclamped_uniform,  ///< strictly increasing, constant spacing (periodic use)
};

/// Non-decreasing knot sequence together with the polynomial degree.
/// The valid evaluation domain is [values[degree], values[basis_count()]].
struct KnotVector {
  std::vector<double> values;
  int degree = 0;
  KnotKind kind = KnotKind::clamped;

  int basis_count() const {
    return static_cast<int>(values.size()) - degree - 1;
  }
  double domain_min() const { return values[degree]; }
  double domain_max() const { return values[basis_count()]; }
};

/// Builds a knot vector spanning [a, b] for `basis_count` basis functions.
/// clamped: end knots repeated degree+1 times, interior knots uniform.
/// unclamped_uniform: constant spacing, degree extra knots beyond each end
/// so that the full domain [a, b] is covered by complete basis supports.
/// Throws ArgumentError if basis_count < degree + 1 or !(a < b).
KnotVector make_knots(KnotKind kind, int basis_count, int degree, double a,
                      double b);

/// Index of the knot span containing u: values[span] <= u < values[span+1],
/// with the right domain end mapped to the last non-empty span.
/// Throws DomainError for u outside [domain_min, domain_max] beyond 1e-12.
int find_span(const KnotVector& kv, double u);

/// The degree+1 basis values that are possibly non-zero at u, ordered by
/// basis index span-degree .. span.
struct BasisSpan {
  int span = 0;
  std::vector<double> values;
};

BasisSpan basis_values(const KnotVector& kv, double u);

/// Basis derivatives up to `order`; rows[k][j] is the k-th derivative of
/// basis function span-degree+j at u. rows[0] equals basis_values.
/// Throws ArgumentError if order < 0 or order > degree.
struct BasisDerivatives {
  int span = 0;
  std::vector<std::vector<double>> rows;  // (order+1) x (degree+1)
};

BasisDerivatives basis_derivatives(const KnotVector& kv, double u, int order);

}  // namespace cuspfit
