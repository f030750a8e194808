#pragma once

#include <span>
#include <vector>

#include "cuspfit/types.hpp"

namespace cuspfit {

/// Result of a nearest-neighbor query against an indexed point set.
struct Nearest {
  int index = -1;
  double dist2 = 0.0;
};

/// Exact nearest-neighbor index over a fixed point set, backed by a uniform
/// spatial grid with cubic cells. Query results are identical to a brute
/// force scan, including the tie rule: equal distances resolve to the
/// lowest point index.
class NearestIndex {
 public:
  explicit NearestIndex(std::span<const Vec3> points);

  Nearest nearest(const Vec3& q) const;

  /// Calls fn(index, dist2) for every point with |p - q| <= radius.
  template <class Fn>
  void for_each_within(const Vec3& q, double radius, Fn&& fn) const {
    const double r2 = radius * radius;
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = cell_coord(q[a] - radius, a);
      hi[a] = cell_coord(q[a] + radius, a);
    }
    for (int cx = lo[0]; cx <= hi[0]; ++cx)
      for (int cy = lo[1]; cy <= hi[1]; ++cy)
        for (int cz = lo[2]; cz <= hi[2]; ++cz) {
          if (cell_min_dist2(q, cx, cy, cz) > r2) continue;
          const int c = flat(cx, cy, cz);
          for (int k = starts_[c]; k < starts_[c + 1]; ++k) {
            const int idx = order_[k];
            const double d2 = (pts_[idx] - q).squaredNorm();
            if (d2 <= r2) fn(idx, d2);
          }
        }
  }

  std::size_t size() const { return pts_.size(); }

 private:
  int cell_coord(double x, int axis) const;
  int flat(int cx, int cy, int cz) const {
    return (cx * dims_[1] + cy) * dims_[2] + cz;
  }
  double cell_min_dist2(const Vec3& q, int cx, int cy, int cz) const;

  std::vector<Vec3> pts_;
  Vec3 lo_ = Vec3::Zero();
  double edge_ = 1.0;
  int dims_[3] = {1, 1, 1};
  std::vector<int> starts_;  // CSR offsets, size cells+1
  std::vector<int> order_;   // point indices grouped by cell, ascending
};

/// Nearest neighbor in `data` for every query point. Uses a plain double
/// loop when queries*data <= 256*256 pairings and the grid index above
/// that; both paths return identical results. `threads` <= 0 = all cores.
std::vector<Nearest> nearest_all(std::span<const Vec3> data,
                                 std::span<const Vec3> queries,
                                 int threads = 1);

}  // namespace cuspfit
