#pragma once

// Shared fixtures and brute-force oracle helpers for the test suites.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cuspfit/geometry.hpp"
#include "cuspfit/nearest.hpp"
#include "cuspfit/pipeline.hpp"
#include "cuspfit/rng.hpp"
#include "cuspfit/synthdata.hpp"

namespace testsup {

using cuspfit::PointCloud;
using cuspfit::SplineSurface;
using cuspfit::SurfaceSamples;
using cuspfit::Vec3;

/// Template surface with control points jittered by `scale` per coordinate.
inline SplineSurface jittered_surface(int n_axial, int n_circ_free,
                                      std::uint64_t seed, double scale) {
  cuspfit::TemplateSpec spec;
  spec.n_axial = n_axial;
  spec.n_circ_free = n_circ_free;
  SplineSurface s = cuspfit::make_template(spec);
  cuspfit::Rng rng(seed);
  for (auto& p : s.free_grid.data)
    for (int c = 0; c < 3; ++c) p[c] += rng.uniform(-scale, scale);
  return s;
}

/// Uniform random points in an axis-aligned box.
inline std::vector<Vec3> random_points(int n, std::uint64_t seed, double lo,
                                       double hi) {
  cuspfit::Rng rng(seed);
  std::vector<Vec3> pts(n);
  for (auto& p : pts)
    for (int c = 0; c < 3; ++c) p[c] = rng.uniform(lo, hi);
  return pts;
}

/// Cloud of points evaluated at random surface parameters, then jittered.
/// The jitter breaks exact nearest-neighbor and argmax ties.
inline PointCloud cloud_near_surface(const SplineSurface& s, int n,
                                     std::uint64_t seed, double jitter) {
  cuspfit::Rng rng(seed);
  const double ulo = s.knots_axial.domain_min();
  const double uhi = s.knots_axial.domain_max();
  PointCloud cloud;
  cloud.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(ulo, uhi);
    const double v = rng.uniform(0.0, s.circ_period());
    Vec3 p = cuspfit::surface_point(s, u, v);
    for (int c = 0; c < 3; ++c) p[c] += rng.uniform(-jitter, jitter);
    cloud.points.push_back(p);
  }
  return cloud;
}

/// Component-wise numeric equality (unlike Eigen's operator==, usable as a
/// plain bool).
inline bool same3(const Vec3& a, const Vec3& b) {
  return a[0] == b[0] && a[1] == b[1] && a[2] == b[2];
}

/// Brute-force nearest neighbor, lowest index on ties.
inline cuspfit::Nearest brute_nearest(const std::vector<Vec3>& data,
                                      const Vec3& q) {
  cuspfit::Nearest best;
  best.dist2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d2 = (data[i] - q).squaredNorm();
    if (d2 < best.dist2) {
      best.dist2 = d2;
      best.index = static_cast<int>(i);
    }
  }
  return best;
}

/// Hand-assembled sample set; geometry fields default to benign values.
inline SurfaceSamples manual_samples(const std::vector<Vec3>& points,
                                     const std::vector<Vec3>& normals = {},
                                     const std::vector<std::uint8_t>& boundary = {}) {
  SurfaceSamples s;
  s.n_u = static_cast<int>(points.size());
  s.n_v = 1;
  s.points = points;
  s.normals = normals.empty()
                  ? std::vector<Vec3>(points.size(), Vec3(0, 0, 1))
                  : normals;
  s.tangent_u.assign(points.size(), Vec3(1, 0, 0));
  s.tangent_v.assign(points.size(), Vec3(0, 1, 0));
  s.boundary = boundary.empty() ? std::vector<std::uint8_t>(points.size(), 0)
                                : boundary;
  s.degenerate.assign(points.size(), 0);
  s.params.assign(points.size(), {0.0, 0.0});
  return s;
}

/// k-th circumferential derivative at (u, v) evaluated through find_span's
/// own span selection: v = 0 uses the first span, v = period the last one.
/// Comparing the two certifies seam continuity through genuinely different
/// basis functions and control columns.
inline Vec3 circ_limit_deriv(const SplineSurface& s, double u, double v,
                             int k) {
  const cuspfit::BasisSpan bu = cuspfit::basis_values(s.knots_axial, u);
  const cuspfit::BasisDerivatives bv =
      cuspfit::basis_derivatives(s.knots_circ, v, k);
  Vec3 acc = Vec3::Zero();
  for (int j = 0; j <= s.degree_circ; ++j) {
    const int wrapped = bv.span - s.degree_circ + j;
    Vec3 col = Vec3::Zero();
    for (int i = 0; i <= s.degree_axial; ++i)
      col += bu.values[i] * s.control(bu.span - s.degree_axial + i, wrapped);
    acc += bv.rows[k][j] * col;
  }
  return acc;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// Fresh empty directory under the system temp root.
inline std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("cuspfit_test_" + tag + "_" + std::to_string(counter++) +
                        "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace testsup
