#include "cuspfit/knots.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cuspfit {

namespace {
constexpr double kDomainTol = 1e-12;
}

KnotVector make_knots(KnotKind kind, int basis_count, int degree, double a,
                      double b) {
  if (degree < 1) throw ArgumentError("degree must be >= 1");
  if (basis_count < degree + 1)
    throw ArgumentError("basis_count must be >= degree + 1 (got " +
                        std::to_string(basis_count) + " for degree " +
                        std::to_string(degree) + ")");
  if (!(a < b)) throw ArgumentError("knot domain requires a < b");

  const int n_knots = basis_count + degree + 1;
  const int spans = basis_count - degree;
  const double h = (b - a) / spans;

  KnotVector kv;
  kv.degree = degree;
  kv.kind = kind;
  kv.values.resize(n_knots);

  if (kind == KnotKind::clamped) {
    for (int i = 0; i <= degree; ++i) {
      kv.values[i] = a;
      kv.values[n_knots - 1 - i] = b;
    }
    for (int j = 1; j < spans; ++j) kv.values[degree + j] = a + j * h;
  } else {
    for (int k = 0; k < n_knots; ++k) kv.values[k] = a + (k - degree) * h;
    kv.values[degree] = a;       // pin the domain ends exactly
    kv.values[basis_count] = b;
  }
  return kv;
}

int find_span(const KnotVector& kv, double u) {
  const int p = kv.degree;
  const int n = kv.basis_count();
  const double lo = kv.values[p];
  const double hi = kv.values[n];

  if (!std::isfinite(u) || u < lo - kDomainTol || u > hi + kDomainTol)
    throw DomainError("parameter " + std::to_string(u) +
                      " outside knot domain [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");

  if (u >= hi) {
    int i = n - 1;
    while (i > p && !(kv.values[i] < kv.values[i + 1])) --i;
    return i;
  }
  const double uu = std::max(u, lo);

  int low = p, high = n;
  while (high - low > 1) {
    const int mid = (low + high) / 2;
    if (uu < kv.values[mid])
      high = mid;
    else
      low = mid;
  }
  return low;
}

BasisSpan basis_values(const KnotVector& kv, double u) {
  const int p = kv.degree;
  const int span = find_span(kv, u);
  const double uu =
      std::clamp(u, kv.values[p], kv.values[kv.basis_count()]);

  BasisSpan out;
  out.span = span;
  out.values.assign(p + 1, 0.0);
  std::vector<double> left(p + 1), right(p + 1);

  out.values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = uu - kv.values[span + 1 - j];
    right[j] = kv.values[span + j] - uu;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out.values[r] / (right[r + 1] + left[j - r]);
      out.values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out.values[j] = saved;
  }
  return out;
}

BasisDerivatives basis_derivatives(const KnotVector& kv, double u, int order) {
  const int p = kv.degree;
  if (order < 0 || order > p)
    throw ArgumentError("derivative order must be in [0, degree]");

  const int span = find_span(kv, u);
  const double uu =
      std::clamp(u, kv.values[p], kv.values[kv.basis_count()]);

  // Triangular table of basis values and knot differences (Piegl-Tiller
  // DersBasisFuns); ndu upper triangle holds values, lower the differences.
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> left(p + 1), right(p + 1);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = uu - kv.values[span + 1 - j];
    right[j] = kv.values[span + j] - uu;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  BasisDerivatives out;
  out.span = span;
  out.rows.assign(order + 1, std::vector<double>(p + 1, 0.0));
  for (int j = 0; j <= p; ++j) out.rows[0][j] = ndu[j][p];

  std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= order; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out.rows[k][r] = d;
      std::swap(s1, s2);
    }
  }

  double factor = p;
  for (int k = 1; k <= order; ++k) {
    for (int j = 0; j <= p; ++j) out.rows[k][j] *= factor;
    factor *= (p - k);
  }
  return out;
}

}  // namespace cuspfit
