#include <algorithm>
#include <cmath>
#include <vector>

#include "cuspfit/nearest.hpp"
#include "cuspfit/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cuspfit;

namespace {

// Brute reference for for_each_within: every index with |p - q| <= radius.
std::vector<int> brute_within(const std::vector<Vec3>& pts, const Vec3& q,
                              double radius) {
  std::vector<int> hits;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if ((pts[i] - q).squaredNorm() <= r2) hits.push_back(int(i));
  return hits;
}

}  // namespace

TEST_SUITE("nearest") {
  TEST_CASE("grid index matches brute scan on random instances") {
    Rng rng(404);
    for (int rep = 0; rep < 60; ++rep) {
      const std::size_t n = 1 + rng.below(400);
      std::vector<Vec3> pts;
      pts.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        pts.push_back(Vec3(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                           rng.uniform(-3.0, 3.0)));
      NearestIndex index(pts);
      for (int qi = 0; qi < 25; ++qi) {
        const Vec3 q(rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0),
                     rng.uniform(-4.0, 4.0));
        const Nearest got = index.nearest(q);
        const Nearest want = testsup::brute_nearest(pts, q);
        CHECK(got.index == want.index);
        CHECK(got.dist2 == want.dist2);
      }
    }
  }

  TEST_CASE("duplicate points resolve to the lowest index") {
    std::vector<Vec3> pts = {Vec3(1, 1, 1), Vec3(0, 0, 0), Vec3(0, 0, 0),
                             Vec3(0, 0, 0), Vec3(2, 0, 0)};
    NearestIndex index(pts);
    const Nearest hit = index.nearest(Vec3(0.1, 0.0, 0.0));
    CHECK(hit.index == 1);

    // Query exactly on the duplicates.
    CHECK(index.nearest(Vec3(0, 0, 0)).index == 1);
    CHECK(index.nearest(Vec3(0, 0, 0)).dist2 == 0.0);
  }

  TEST_CASE("equidistant lattice tie resolves to the lowest index") {
    // Query at the center of a symmetric pair: both points at distance 1.
    std::vector<Vec3> pts = {Vec3(-1, 0, 0), Vec3(1, 0, 0)};
    NearestIndex index(pts);
    const Nearest hit = index.nearest(Vec3(0, 0, 0));
    CHECK(hit.index == 0);
    CHECK(hit.dist2 == 1.0);

    // Same with the pair order swapped; still the lowest index wins.
    std::vector<Vec3> swapped = {Vec3(1, 0, 0), Vec3(-1, 0, 0)};
    CHECK(NearestIndex(swapped).nearest(Vec3(0, 0, 0)).index == 0);

    // Cube corners: eight points all at equal distance from the center.
    std::vector<Vec3> cube;
    for (int x = 0; x <= 1; ++x)
      for (int y = 0; y <= 1; ++y)
        for (int z = 0; z <= 1; ++z) cube.push_back(Vec3(x, y, z));
    CHECK(NearestIndex(cube).nearest(Vec3(0.5, 0.5, 0.5)).index == 0);
  }

  TEST_CASE("single point and collinear sets") {
    std::vector<Vec3> one = {Vec3(3, -2, 5)};
    NearestIndex index(one);
    const Nearest hit = index.nearest(Vec3(0, 0, 0));
    CHECK(hit.index == 0);
    CHECK(hit.dist2 == doctest::Approx(38.0).epsilon(1e-15));

    // All points on a line: degenerate extent along two axes.
    std::vector<Vec3> line;
    for (int i = 0; i < 50; ++i) line.push_back(Vec3(0.1 * i, 0, 0));
    NearestIndex li(line);
    Rng rng(7);
    for (int qi = 0; qi < 40; ++qi) {
      const Vec3 q(rng.uniform(-1.0, 6.0), rng.uniform(-1.0, 1.0),
                   rng.uniform(-1.0, 1.0));
      const Nearest got = li.nearest(q);
      const Nearest want = testsup::brute_nearest(line, q);
      CHECK(got.index == want.index);
      CHECK(got.dist2 == want.dist2);
    }
  }

  TEST_CASE("all points coincident") {
    std::vector<Vec3> pts(20, Vec3(1, 2, 3));
    NearestIndex index(pts);
    CHECK(index.nearest(Vec3(4, 2, 3)).index == 0);
    CHECK(index.nearest(Vec3(4, 2, 3)).dist2 == 9.0);
  }

  TEST_CASE("queries far outside the data bounding box") {
    Rng rng(11);
    std::vector<Vec3> pts;
    for (int i = 0; i < 120; ++i)
      pts.push_back(Vec3(rng.uniform01(), rng.uniform01(), rng.uniform01()));
    NearestIndex index(pts);
    const Vec3 far_q(1e4, -1e4, 1e4);
    const Nearest got = index.nearest(far_q);
    const Nearest want = testsup::brute_nearest(pts, far_q);
    CHECK(got.index == want.index);
    CHECK(got.dist2 == want.dist2);
  }

  TEST_CASE("nearest_all equals per-query brute on both code paths") {
    Rng rng(505);
    // Small instance: data*queries below the brute threshold.
    {
      std::vector<Vec3> data, queries;
      for (int i = 0; i < 100; ++i)
        data.push_back(
            Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
      for (int i = 0; i < 80; ++i)
        queries.push_back(
            Vec3(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)));
      const auto got = nearest_all(data, queries);
      REQUIRE(got.size() == queries.size());
      for (std::size_t i = 0; i < queries.size(); ++i) {
        const Nearest want = testsup::brute_nearest(data, queries[i]);
        CHECK(got[i].index == want.index);
        CHECK(got[i].dist2 == want.dist2);
      }
    }
    // Large instance: forces the grid-index path (data*queries > 256*256).
    {
      std::vector<Vec3> data, queries;
      for (int i = 0; i < 700; ++i)
        data.push_back(
            Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
      for (int i = 0; i < 150; ++i)
        queries.push_back(
            Vec3(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)));
      const auto got = nearest_all(data, queries);
      REQUIRE(got.size() == queries.size());
      for (std::size_t i = 0; i < queries.size(); ++i) {
        const Nearest want = testsup::brute_nearest(data, queries[i]);
        CHECK(got[i].index == want.index);
        CHECK(got[i].dist2 == want.dist2);
      }
    }
  }

  TEST_CASE("brute and grid paths agree with each other near the threshold") {
    // 256*256 = 65536 pairings is the crossover. Straddle it with the same
    // generator state so the two instances differ only by one query point.
    Rng rng(606);
    std::vector<Vec3> data;
    for (int i = 0; i < 256; ++i)
      data.push_back(
          Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
    std::vector<Vec3> queries;
    for (int i = 0; i < 257; ++i)
      queries.push_back(
          Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));

    const auto big = nearest_all(data, queries);  // 256*257: grid path
    std::vector<Vec3> head(queries.begin(), queries.end() - 1);
    const auto small = nearest_all(data, head);  // 256*256: brute path
    REQUIRE(big.size() == 257);
    REQUIRE(small.size() == 256);
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(big[i].index == small[i].index);
      CHECK(big[i].dist2 == small[i].dist2);
    }
  }

  TEST_CASE("nearest_all matches across thread counts bitwise") {
    Rng rng(707);
    std::vector<Vec3> data, queries;
    for (int i = 0; i < 500; ++i)
      data.push_back(
          Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
    for (int i = 0; i < 300; ++i)
      queries.push_back(
          Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
    const auto one = nearest_all(data, queries, 1);
    const auto four = nearest_all(data, queries, 4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].index == four[i].index);
      CHECK(one[i].dist2 == four[i].dist2);
    }
  }

  TEST_CASE("for_each_within reports exactly the in-radius set") {
    Rng rng(808);
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t n = 1 + rng.below(300);
      std::vector<Vec3> pts;
      for (std::size_t i = 0; i < n; ++i)
        pts.push_back(
            Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
      NearestIndex index(pts);
      for (int qi = 0; qi < 10; ++qi) {
        const Vec3 q(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                     rng.uniform(-2.0, 2.0));
        const double radius = rng.uniform(0.0, 2.5);
        std::vector<int> got;
        index.for_each_within(q, radius,
                              [&](int idx, double) { got.push_back(idx); });
        std::sort(got.begin(), got.end());
        CHECK(got == brute_within(pts, q, radius));
      }
    }
  }

  TEST_CASE("for_each_within includes points exactly on the radius") {
    std::vector<Vec3> pts = {Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 3)};
    NearestIndex index(pts);
    std::vector<int> got;
    index.for_each_within(Vec3(0, 0, 0), 2.0,
                          [&](int idx, double) { got.push_back(idx); });
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<int>{0, 1});

    // Zero radius only reports coincident points.
    got.clear();
    index.for_each_within(Vec3(1, 0, 0), 0.0,
                          [&](int idx, double d2) {
                            got.push_back(idx);
                            CHECK(d2 == 0.0);
                          });
    CHECK(got == std::vector<int>{0});
  }

  TEST_CASE("for_each_within passes squared distances") {
    std::vector<Vec3> pts = {Vec3(2, 0, 0), Vec3(0, 0, 0)};
    NearestIndex index(pts);
    index.for_each_within(Vec3(0, 0, 0), 3.0, [&](int idx, double d2) {
      if (idx == 0) CHECK(d2 == 4.0);
      if (idx == 1) CHECK(d2 == 0.0);
    });
  }
}
