#include <cmath>
#include <limits>
#include <vector>

#include "cuspfit/knots.hpp"
#include "cuspfit/pipeline.hpp"
#include "cuspfit/surface.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cuspfit;

namespace {

KnotVector spec_clamped() { return make_knots(KnotKind::clamped, 8, 3, 0, 5); }
KnotVector spec_uniform() {
  return make_knots(KnotKind::unclamped_uniform, 8, 3, 0, 5);
}

}  // namespace

TEST_SUITE("splinecore") {

TEST_CASE("find_span on the clamped reference knot vector") {
  const KnotVector kv = spec_clamped();
  CHECK(find_span(kv, 2.5) == 5);
  CHECK(find_span(kv, 5.0) == 7);  // right end maps to the last nonempty span
  CHECK(find_span(kv, 0.0) == 3);
  CHECK_THROWS_AS(find_span(kv, -0.1), DomainError);
  CHECK_THROWS_AS(find_span(kv, 5.1), DomainError);
}

TEST_CASE("basis values at hand-computed cubic stations") {
  const KnotVector uni = spec_uniform();
  // interior knot of a uniform cubic
  BasisSpan at_knot = basis_values(uni, 2.0);
  REQUIRE(at_knot.values.size() == 4);
  CHECK(at_knot.values[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(at_knot.values[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(at_knot.values[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(at_knot.values[3] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  // span midpoint
  BasisSpan at_mid = basis_values(uni, 2.5);
  CHECK(at_mid.values[0] == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
  CHECK(at_mid.values[1] == doctest::Approx(23.0 / 48.0).epsilon(1e-12));
  CHECK(at_mid.values[2] == doctest::Approx(23.0 / 48.0).epsilon(1e-12));
  CHECK(at_mid.values[3] == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
  // clamped left end interpolates
  BasisSpan at_end = basis_values(spec_clamped(), 0.0);
  CHECK(at_end.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(at_end.values[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("basis values form a partition of unity in [0, 1]") {
  const KnotVector uni = spec_uniform();
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(0.0, 5.0);
    const BasisSpan b = basis_values(uni, u);
    double sum = 0.0;
    for (double w : b.values) {
      CHECK(w >= -1e-14);
      CHECK(w <= 1.0 + 1e-14);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("basis derivatives match hand-derived rows") {
  // Bezier endpoint derivative
  const KnotVector bez = make_knots(KnotKind::clamped, 4, 3, 0, 1);
  BasisDerivatives d0 = basis_derivatives(bez, 0.0, 1);
  CHECK(d0.rows[1][0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(d0.rows[1][1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(d0.rows[1][2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(d0.rows[1][3] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  // uniform cubic at an interior knot, unit spacing
  BasisDerivatives d1 = basis_derivatives(spec_uniform(), 2.0, 1);
  CHECK(d1.rows[1][0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(d1.rows[1][1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(d1.rows[1][2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d1.rows[1][3] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("derivative rows sum to zero and order 0 equals basis values") {
  const KnotVector uni = spec_uniform();
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double u = rng.uniform(0.0, 5.0);
    const BasisDerivatives d = basis_derivatives(uni, u, 2);
    const BasisSpan b = basis_values(uni, u);
    REQUIRE(d.span == b.span);
    for (int k = 1; k <= 2; ++k) {
      double sum = 0.0;
      for (double w : d.rows[k]) sum += w;
      CHECK(std::abs(sum) <= 1e-12 * (k == 1 ? 1.0 : 10.0));
    }
    for (int j = 0; j < 4; ++j)
      CHECK(d.rows[0][j] == doctest::Approx(b.values[j]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(basis_derivatives(uni, 1.0, 4), ArgumentError);
  CHECK_THROWS_AS(basis_derivatives(uni, 1.0, -1), ArgumentError);
}

TEST_CASE("make_knots reproduces the reference vectors") {
  const KnotVector c = spec_clamped();
  CHECK(c.values ==
        std::vector<double>{0, 0, 0, 0, 1, 2, 3, 4, 5, 5, 5, 5});
  CHECK(c.basis_count() == 8);
  const KnotVector u = spec_uniform();
  CHECK(u.values ==
        std::vector<double>{-3, -2, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(u.domain_min() == 0.0);
  CHECK(u.domain_max() == 5.0);
  CHECK_THROWS_AS(make_knots(KnotKind::clamped, 3, 3, 0, 1), ArgumentError);
  CHECK_THROWS_AS(make_knots(KnotKind::clamped, 8, 3, 1, 1), ArgumentError);
}

TEST_CASE("knot vector invariants hold for generated vectors") {
  for (int bc : {4, 5, 9, 17}) {
    for (auto kind : {KnotKind::clamped, KnotKind::unclamped_uniform}) {
      const KnotVector kv = make_knots(kind, bc, 3, -2.0, 3.0);
      CHECK(static_cast<int>(kv.values.size()) == bc + 3 + 1);
      for (std::size_t i = 1; i < kv.values.size(); ++i)
        CHECK(kv.values[i] >= kv.values[i - 1]);
      if (kind == KnotKind::clamped) {
        for (int i = 0; i < 4; ++i) {
          CHECK(kv.values[i] == kv.values[0]);
          CHECK(kv.values[kv.values.size() - 1 - i] == kv.values.back());
        }
        CHECK(kv.domain_min() == -2.0);
        CHECK(kv.domain_max() == 3.0);
      } else {
        const double h = kv.values[1] - kv.values[0];
        for (std::size_t i = 1; i < kv.values.size(); ++i) {
          CHECK(kv.values[i] > kv.values[i - 1]);
          CHECK(kv.values[i] - kv.values[i - 1] ==
                doctest::Approx(h).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("clamped corners of a bilinear surface interpolate the controls") {
  SplineSurface s = SplineSurface::open(1, 1, 2, 2);
  s.free_grid(0, 0) = Vec3(0, 0, 0);
  s.free_grid(0, 1) = Vec3(0, 1, 0);
  s.free_grid(1, 0) = Vec3(1, 0, 0);
  s.free_grid(1, 1) = Vec3(1, 1, 5);
  CHECK(testsup::same3(surface_point(s, 0, 0), s.free_grid(0, 0)));
  CHECK(testsup::same3(surface_point(s, 0, 1), s.free_grid(0, 1)));
  CHECK(testsup::same3(surface_point(s, 1, 0), s.free_grid(1, 0)));
  CHECK(testsup::same3(surface_point(s, 1, 1), s.free_grid(1, 1)));
  CHECK(testsup::same3(surface_point(s, 0.5, 0.5), Vec3(0.5, 0.5, 1.25)));
}

TEST_CASE("template rings stay within the cubic circle approximation band") {
  // Control rows are circles of radius R, so every circumferential ring of
  // the evaluated surface is the periodic uniform cubic curve through a
  // regular 23-gon on that circle. Its radius oscillates between the
  // midpoint value and the knot value, both known in closed form.
  TemplateSpec spec;
  const SplineSurface s = make_template(spec);
  const double R = spec.radius;
  const double th = 2.0 * M_PI / spec.n_circ_free;
  const double r_knot = R * (2.0 + std::cos(th)) / 3.0;
  const double r_mid =
      R * (23.0 * std::cos(th / 2.0) + std::cos(1.5 * th)) / 24.0;
  const double band = R - r_mid;  // max radial deviation from the circle
  for (double u : {0.0, 0.31, 0.5, 0.77, 1.0}) {
    double rmin = 1e300, rmax = 0.0;
    for (int j = 0; j < 400; ++j) {
      const Vec3 p = surface_point(s, u, j / 400.0);
      const double r = std::hypot(p[0], p[1]);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      CHECK(std::abs(r - R) <= band * (1.0 + 1e-9) + 1e-12);
    }
    // constant per ring up to the knot/midpoint oscillation
    CHECK(rmax - rmin <= (r_knot - r_mid) * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("evaluation one period apart returns the same point") {
  const SplineSurface s = testsup::jittered_surface(6, 23, 11, 0.5);
  const double period = s.circ_period();
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double u = rng.uniform(0.0, 1.0);
    const double v = rng.uniform(0.0, period);
    const Vec3 a = surface_point(s, u, v);
    const Vec3 b = surface_point(s, u, v + period);
    CHECK((a - b).norm() < 1e-12);
  }
}

TEST_CASE("surface evaluation rejects out-of-domain parameters") {
  const SplineSurface s = make_template(TemplateSpec{});
  CHECK_THROWS_AS(surface_point(s, -0.01, 0.5), DomainError);
  CHECK_THROWS_AS(surface_point(s, 1.01, 0.5), DomainError);
  CHECK(std::isfinite(surface_point(s, 0.999, 123.456)[0]));
}

TEST_CASE("control sensitivity sums to one with local support") {
  const SplineSurface s = testsup::jittered_surface(6, 23, 5, 0.4);
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(0.0, 1.0);
    const double v = rng.uniform(0.0, 1.0);
    const ScalarGrid g = control_sensitivity(s, u, v);
    double sum = 0.0;
    int nonzero = 0;
    for (double w : g.data) {
      sum += w;
      if (w != 0.0) ++nonzero;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nonzero <= 16);
  }
}

TEST_CASE("only one axial row is active at a clamped corner") {
  const SplineSurface s = make_template(TemplateSpec{});
  const ScalarGrid g = control_sensitivity(s, 0.0, 0.37);
  for (int i = 1; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j) CHECK(g(i, j) == 0.0);
  double row0 = 0.0;
  for (int j = 0; j < g.cols; ++j) row0 += g(0, j);
  CHECK(row0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("perturbing one control moves the point by its weight") {
  SplineSurface s = testsup::jittered_surface(6, 23, 21, 0.3);
  const double h = 1e-6;
  // one plain interior column and one column with a wrapped alias
  const std::pair<double, double> stations[] = {{0.43, 0.31}, {0.43, 0.995}};
  for (auto [u, v] : stations) {
    const ScalarGrid g = control_sensitivity(s, u, v);
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j) {
        if (g(i, j) == 0.0) continue;
        const Vec3 before = surface_point(s, u, v);
        SplineSurface pert = s;
        pert.free_grid(i, j)[0] += h;
        const Vec3 after = surface_point(pert, u, v);
        CHECK(std::abs((after - before)[0] - h * g(i, j)) <= 1e-10);
        CHECK(std::abs((after - before)[1]) <= 1e-15);
      }
  }
}

TEST_CASE("sensitivities accumulate wrapped aliases onto free columns") {
  const SplineSurface s = testsup::jittered_surface(6, 23, 33, 0.2);
  Rng rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    const double u = rng.uniform(0.0, 1.0);
    const double v = rng.uniform(0.0, 1.0);
    const ScalarGrid g = control_sensitivity(s, u, v);
    // independent reconstruction from raw basis products
    const BasisSpan bu = basis_values(s.knots_axial, u);
    const BasisSpan bv = basis_values(s.knots_circ, v);
    ScalarGrid raw(g.rows, g.cols);
    for (int i = 0; i <= s.degree_axial; ++i)
      for (int j = 0; j <= s.degree_circ; ++j) {
        const int row = bu.span - s.degree_axial + i;
        const int wrapped = bv.span - s.degree_circ + j;
        raw(row, s.free_col(wrapped)) += bu.values[i] * bv.values[j];
      }
    for (std::size_t k = 0; k < raw.data.size(); ++k)
      CHECK(std::abs(raw.data[k] - g.data[k]) <= 1e-15);
  }
}

TEST_CASE("seam is C2 on the default template") {
  const SplineSurface s = make_template(TemplateSpec{});
  const double period = s.circ_period();
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double u = rng.uniform(0.0, 1.0);
    for (int k = 0; k <= 2; ++k) {
      const Vec3 a = testsup::circ_limit_deriv(s, u, 0.0, k);
      const Vec3 b = testsup::circ_limit_deriv(s, u, period, k);
      CHECK((a - b).norm() <= 1e-9);
    }
  }
}

TEST_CASE("structural invariants are enforced") {
  CHECK_THROWS_AS(SplineSurface::periodic(3, 3, 6, 3), ArgumentError);
  CHECK_THROWS_AS(SplineSurface::periodic(3, 3, 3, 23), ArgumentError);
  SplineSurface ok = SplineSurface::periodic(3, 3, 4, 4);
  ok.validate();
  ok.free_grid.data[0][0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ok.validate(), ArgumentError);
}

}  // TEST_SUITE
