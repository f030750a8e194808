#include "cuspfit/nearest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuspfit/errors.hpp"
#include "parallel.hpp"

namespace cuspfit {

namespace {
constexpr std::size_t kBrutePairings = 256u * 256u;
}

NearestIndex::NearestIndex(std::span<const Vec3> points)
    : pts_(points.begin(), points.end()) {
  if (pts_.empty()) throw ArgumentError("nearest index needs >= 1 point");

  Vec3 hi = pts_[0];
  lo_ = pts_[0];
  for (const Vec3& p : pts_) {
    lo_ = lo_.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 ext = hi - lo_;
  const double max_ext = std::max({ext[0], ext[1], ext[2]});

  // Roughly one point per cell, capped so the table stays small.
  const int k = std::clamp(
      static_cast<int>(std::ceil(std::cbrt(static_cast<double>(pts_.size())))),
      1, 96);
  edge_ = (max_ext > 0.0) ? max_ext / k : 1.0;
  int cells = 1;
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::max(1, static_cast<int>(std::floor(ext[a] / edge_)) + 1);
    cells *= dims_[a];
  }

  starts_.assign(cells + 1, 0);
  std::vector<int> cell_of(pts_.size());
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    const int c = flat(cell_coord(pts_[i][0], 0), cell_coord(pts_[i][1], 1),
                       cell_coord(pts_[i][2], 2));
    cell_of[i] = c;
    ++starts_[c + 1];
  }
  for (int c = 0; c < cells; ++c) starts_[c + 1] += starts_[c];
  order_.resize(pts_.size());
  std::vector<int> cursor(starts_.begin(), starts_.end() - 1);
  for (std::size_t i = 0; i < pts_.size(); ++i)
    order_[cursor[cell_of[i]]++] = static_cast<int>(i);
}

int NearestIndex::cell_coord(double x, int axis) const {
  const int c = static_cast<int>(std::floor((x - lo_[axis]) / edge_));
  return std::clamp(c, 0, dims_[axis] - 1);
}

double NearestIndex::cell_min_dist2(const Vec3& q, int cx, int cy,
                                    int cz) const {
  const int c[3] = {cx, cy, cz};
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double blo = lo_[a] + c[a] * edge_;
    const double bhi = blo + edge_;
    double d = 0.0;
    if (q[a] < blo)
      d = blo - q[a];
    else if (q[a] > bhi)
      d = q[a] - bhi;
    d2 += d * d;
  }
  return d2;
}

Nearest NearestIndex::nearest(const Vec3& q) const {
  const int qc[3] = {cell_coord(q[0], 0), cell_coord(q[1], 1),
                     cell_coord(q[2], 2)};
  int max_r = 0;
  for (int a = 0; a < 3; ++a)
    max_r = std::max(max_r, std::max(qc[a], dims_[a] - 1 - qc[a]));

  Nearest best{-1, std::numeric_limits<double>::infinity()};
  for (int r = 0; r <= max_r; ++r) {
    // Once a hit exists, farther rings cannot contain a strictly closer or
    // equidistant point: their boxes are at least (r-1)*edge away.
    if (best.index >= 0 && r >= 2) {
      const double ring_min = (r - 1) * edge_;
      if (ring_min * ring_min > best.dist2) break;
    }
    const int x0 = std::max(0, qc[0] - r), x1 = std::min(dims_[0] - 1, qc[0] + r);
    const int y0 = std::max(0, qc[1] - r), y1 = std::min(dims_[1] - 1, qc[1] + r);
    const int z0 = std::max(0, qc[2] - r), z1 = std::min(dims_[2] - 1, qc[2] + r);
    for (int cx = x0; cx <= x1; ++cx) {
      for (int cy = y0; cy <= y1; ++cy) {
        for (int cz = z0; cz <= z1; ++cz) {
          const int ring = std::max({std::abs(cx - qc[0]), std::abs(cy - qc[1]),
                                     std::abs(cz - qc[2])});
          if (ring != r) continue;
          if (cell_min_dist2(q, cx, cy, cz) > best.dist2) continue;
          const int c = flat(cx, cy, cz);
          for (int k = starts_[c]; k < starts_[c + 1]; ++k) {
            const int idx = order_[k];
            const double d2 = (pts_[idx] - q).squaredNorm();
            if (d2 < best.dist2 ||
                (d2 == best.dist2 && idx < best.index)) {
              best = {idx, d2};
            }
          }
        }
      }
    }
  }
  return best;
}

std::vector<Nearest> nearest_all(std::span<const Vec3> data,
                                 std::span<const Vec3> queries, int threads) {
  if (data.empty()) throw ArgumentError("nearest_all needs >= 1 data point");
  std::vector<Nearest> out(queries.size());
  if (data.size() * queries.size() <= kBrutePairings) {
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      Nearest best{-1, std::numeric_limits<double>::infinity()};
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double d2 = (data[i] - queries[qi]).squaredNorm();
        if (d2 < best.dist2) best = {static_cast<int>(i), d2};
      }
      out[qi] = best;
    }
    return out;
  }
  const NearestIndex index(data);
  parallel_for(queries.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t qi = b; qi < e; ++qi) out[qi] = index.nearest(queries[qi]);
  });
  return out;
}

}  // namespace cuspfit
