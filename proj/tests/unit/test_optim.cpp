#include <cmath>
#include <vector>

#include "cuspfit/optim.hpp"
#include "cuspfit/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cuspfit;

namespace {

VecGrid constant_grid(int rows, int cols, const Vec3& value) {
  VecGrid g(rows, cols);
  for (Vec3& v : g.data) v = value;
  return g;
}

FitConfig quick_config(int t_max, int record_every = 1) {
  FitConfig cfg;
  cfg.weights = LossWeights::validation();
  cfg.weights.w_a = 0.0;
  cfg.t_max = t_max;
  cfg.record_every = record_every;
  cfg.sample_nu = 10;
  cfg.sample_nv = 20;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_SUITE("optim") {
  TEST_CASE("zero gradient leaves parameters unchanged") {
    OptimizerState st = OptimizerState::init(3, 4, 1e-3);
    VecGrid params = constant_grid(3, 4, Vec3(1.0, -2.0, 0.5));
    const VecGrid before = params;
    adam_step(st, params, constant_grid(3, 4, Vec3::Zero()));
    for (std::size_t i = 0; i < params.data.size(); ++i)
      CHECK(testsup::same3(params.data[i], before.data[i]));
    CHECK(st.t == 1);
  }

  TEST_CASE("first step moves against the gradient by about delta") {
    // With bias correction the first Adam step is delta * g / (|g| + eps)
    // per coordinate, so any nonzero-gradient coordinate moves by nearly
    // exactly delta, in the descent direction.
    const double delta = 2.5e-3;
    OptimizerState st = OptimizerState::init(2, 2, delta);
    VecGrid params = constant_grid(2, 2, Vec3::Zero());
    VecGrid grad = constant_grid(2, 2, Vec3(0.0, 0.0, 0.0));
    grad.data[0] = Vec3(4.0, -0.25, 0.0);
    adam_step(st, params, grad);

    CHECK(params.data[0][0] ==
          doctest::Approx(-delta).epsilon(1e-5));
    CHECK(params.data[0][1] == doctest::Approx(delta).epsilon(1e-5));
    CHECK(params.data[0][2] == 0.0);
    CHECK(testsup::same3(params.data[3], Vec3::Zero()));
  }

  TEST_CASE("quadratic bowl decreases monotonically over two steps") {
    // Loss 0.5*|x|^2 has gradient x; two Adam steps from x=(1,1,1).
    OptimizerState st = OptimizerState::init(1, 1, 1e-2);
    VecGrid x = constant_grid(1, 1, Vec3(1.0, 1.0, 1.0));
    const double l0 = 0.5 * x.data[0].squaredNorm();
    adam_step(st, x, x);
    const double l1 = 0.5 * x.data[0].squaredNorm();
    adam_step(st, x, x);
    const double l2 = 0.5 * x.data[0].squaredNorm();
    CHECK(l1 < l0);
    CHECK(l2 < l1);
  }

  TEST_CASE("shape mismatches are rejected") {
    OptimizerState st = OptimizerState::init(3, 4, 1e-3);
    VecGrid params = constant_grid(3, 4, Vec3::Zero());
    CHECK_THROWS_AS(
        adam_step(st, params, constant_grid(3, 5, Vec3::Zero())),
        ArgumentError);
    VecGrid wrong = constant_grid(2, 4, Vec3::Zero());
    CHECK_THROWS_AS(adam_step(st, wrong, constant_grid(3, 4, Vec3::Zero())),
                    ArgumentError);
  }

  TEST_CASE("fitting a cloud sampled from the template converges in place") {
    // The cloud is the template's own sample set, so the initial surface
    // is already optimal; a short fit must keep the chamfer term tiny.
    const SplineSurface tmpl = testsup::jittered_surface(5, 7, 61, 0.0);
    const SurfaceSamples samples = sample_surface(tmpl, 10, 20);
    PointCloud cloud;
    cloud.points = samples.points;

    FitConfig cfg = quick_config(40, 10);
    cfg.weights = LossWeights{};
    cfg.weights.w_cd = 1.0;
    const FitResult res = fit_single(tmpl, cloud, cfg);
    CHECK(res.status == FitStatus::completed);
    CHECK(res.history.back().loss.d_cd <= 1e-8);
  }

  TEST_CASE("history records first, strided and final iterations") {
    const SplineSurface s = testsup::jittered_surface(5, 7, 63, 0.2);
    const PointCloud cloud = testsup::cloud_near_surface(s, 50, 64, 0.3);

    FitConfig cfg = quick_config(1);
    const FitResult one = fit_single(s, cloud, cfg);
    REQUIRE(one.history.size() == 2);
    CHECK(one.history.front().iteration == 0);
    CHECK(one.history.back().iteration == 1);
    CHECK(one.iterations == 1);

    cfg = quick_config(25, 10);
    const FitResult res = fit_single(s, cloud, cfg);
    std::vector<int> got;
    for (const HistoryEntry& h : res.history) got.push_back(h.iteration);
    CHECK(got == std::vector<int>{0, 10, 20, 25});
  }

  TEST_CASE("loss trend decreases between early and late windows") {
    const SplineSurface s = testsup::jittered_surface(5, 7, 65, 0.4);
    const PointCloud cloud = testsup::cloud_near_surface(s, 120, 66, 0.2);
    FitConfig cfg = quick_config(1000, 1);
    const FitResult res = fit_single(s, cloud, cfg);
    REQUIRE(res.history.size() == 1001);

    double early = 0.0, late = 0.0;
    for (int t = 0; t < 500; ++t) early += res.history[t].loss.total;
    for (int t = 500; t <= 1000; ++t) late += res.history[t].loss.total;
    early /= 500.0;
    late /= 501.0;
    CHECK(late <= early);
  }

  TEST_CASE("fit is bitwise deterministic across thread counts") {
    const SplineSurface s = testsup::jittered_surface(5, 7, 67, 0.3);
    const PointCloud cloud = testsup::cloud_near_surface(s, 80, 68, 0.25);

    FitConfig cfg = quick_config(30, 5);
    cfg.threads = 1;
    const FitResult a = fit_single(s, cloud, cfg);
    cfg.threads = 4;
    const FitResult b = fit_single(s, cloud, cfg);

    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i)
      CHECK(a.history[i].loss.total == b.history[i].loss.total);
    REQUIRE(a.surface.free_grid.data.size() == b.surface.free_grid.data.size());
    for (std::size_t i = 0; i < a.surface.free_grid.data.size(); ++i)
      CHECK(testsup::same3(a.surface.free_grid.data[i],
                           b.surface.free_grid.data[i]));
  }

  TEST_CASE("knot vectors and degrees survive the fit unchanged") {
    const SplineSurface s = testsup::jittered_surface(5, 7, 69, 0.3);
    const PointCloud cloud = testsup::cloud_near_surface(s, 60, 70, 0.3);
    const FitResult res = fit_single(s, cloud, quick_config(15, 5));
    CHECK(res.surface.degree_axial == s.degree_axial);
    CHECK(res.surface.degree_circ == s.degree_circ);
    CHECK(res.surface.knots_axial.values == s.knots_axial.values);
    CHECK(res.surface.knots_circ.values == s.knots_circ.values);
    CHECK(res.surface.free_grid.rows == s.free_grid.rows);
    CHECK(res.surface.free_grid.cols == s.free_grid.cols);
  }

  TEST_CASE("degenerate start heals under active weights") {
    // A collapsed free edge does not survive contact with the data terms:
    // the very first Adam step separates the ring, the degeneracy clears,
    // and the fit runs to completion.
    SplineSurface s = testsup::jittered_surface(5, 7, 71, 0.0);
    const int cols = s.free_grid.cols;
    const int rows = s.free_grid.rows;
    for (int c = 0; c < cols; ++c)
      s.free_grid.data[(rows - 1) * cols + c] = Vec3(0, 0, -15.0);
    const PointCloud cloud = testsup::cloud_near_surface(s, 40, 72, 0.3);

    const FitResult res = fit_single(s, cloud, quick_config(300, 50));
    CHECK(res.status == FitStatus::completed);
    CHECK(res.iterations == 300);
    CHECK(res.last_degenerate_count == 0);
  }

  TEST_CASE("persistent degeneracy aborts with the last good surface") {
    // With every weight zero the gradient is exactly zero, so nothing can
    // repair the collapsed free edge; this isolates the give-up path.
    // Any nonzero weight would heal the ring instead, because Adam turns
    // even roundoff-sized gradients into full-length steps.
    SplineSurface s = testsup::jittered_surface(5, 7, 71, 0.0);
    const int cols = s.free_grid.cols;
    const int rows = s.free_grid.rows;
    for (int c = 0; c < cols; ++c)
      s.free_grid.data[(rows - 1) * cols + c] = Vec3(0, 0, -15.0);
    const PointCloud cloud = testsup::cloud_near_surface(s, 40, 72, 0.3);

    FitConfig cfg = quick_config(5000, 50);
    cfg.weights = LossWeights{};
    const FitResult res = fit_single(s, cloud, cfg);
    CHECK(res.status == FitStatus::failed_degenerate);
    CHECK(res.iterations <= 200);
    CHECK(res.last_degenerate_count > 0);
    CHECK(!res.message.empty());
    // No degeneracy-free iterate ever existed, so the reported surface is
    // the frozen starting one; it must still be valid.
    res.surface.validate();
    for (std::size_t i = 0; i < s.free_grid.data.size(); ++i)
      CHECK(testsup::same3(res.surface.free_grid.data[i], s.free_grid.data[i]));
  }

  TEST_CASE("configuration errors are rejected up front") {
    const SplineSurface s = testsup::jittered_surface(5, 7, 73, 0.1);
    const PointCloud cloud = testsup::cloud_near_surface(s, 30, 74, 0.2);

    FitConfig cfg = quick_config(10);
    cfg.t_max = 0;
    CHECK_THROWS_AS(fit_single(s, cloud, cfg), ArgumentError);

    cfg = quick_config(10);
    cfg.delta = 0.0;
    CHECK_THROWS_AS(fit_single(s, cloud, cfg), ArgumentError);

    cfg = quick_config(10);
    cfg.record_every = 0;
    CHECK_THROWS_AS(fit_single(s, cloud, cfg), ArgumentError);

    cfg = quick_config(10);
    cfg.weights.w_cd = -2.0;
    CHECK_THROWS_AS(fit_single(s, cloud, cfg), ArgumentError);

    PointCloud empty;
    CHECK_THROWS_AS(fit_single(s, empty, quick_config(10)), ArgumentError);
  }

  TEST_CASE("plain descent takes fixed steps along the gradient") {
    const SplineSurface s = testsup::jittered_surface(5, 7, 75, 0.2);
    const PointCloud cloud = testsup::cloud_near_surface(s, 60, 76, 0.3);

    FitConfig cfg = quick_config(1);
    cfg.plain_descent = true;
    cfg.delta = 1e-4;
    const FitResult res = fit_single(s, cloud, cfg);

    const auto [bd, grad] = loss_gradient(s, cloud, cfg.weights,
                                          cfg.sample_nu, cfg.sample_nv, 1);
    for (std::size_t i = 0; i < grad.data.size(); ++i) {
      const Vec3 want = s.free_grid.data[i] - cfg.delta * grad.data[i];
      const Vec3 got = res.surface.free_grid.data[i];
      CHECK((want - got).norm() <= 1e-12);
    }
  }
}
