#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cuspfit/surface.hpp"

namespace cuspfit {

/// Rows are dS/du and dS/dv at (u, v).
Eigen::Matrix<double, 2, 3> surface_jacobian(const SplineSurface& s, double u,
                                             double v);

/// Unit normal (t_u x t_v)/|t_u x t_v|. Throws DegeneracyError when the
/// cross product norm is <= 1e-12.
Vec3 unit_normal(const SplineSurface& s, double u, double v);

/// Samples on a fixed parameter grid, flattened row-major (axial-major).
/// Degenerate sites keep a zero normal and are flagged; boundary marks the
/// annulus-edge row u = u_0.
struct SurfaceSamples {
  int n_u = 0;
  int n_v = 0;
  std::vector<std::pair<double, double>> params;
  std::vector<Vec3> points;
  std::vector<Vec3> tangent_u;
  std::vector<Vec3> tangent_v;
  std::vector<Vec3> normals;
  std::vector<std::uint8_t> boundary;
  std::vector<std::uint8_t> degenerate;
  int degenerate_count = 0;

  std::size_t size() const { return points.size(); }
};

/// Precomputed spans and basis rows for a fixed knot layout and grid size;
/// reusable across evaluations while only control points change.
class SampleGrid {
 public:
  SampleGrid(const SplineSurface& s, int n_u, int n_v);

  int n_u() const { return n_u_; }
  int n_v() const { return n_v_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_u_) * n_v_;
  }
  const std::vector<double>& u_params() const { return u_params_; }
  const std::vector<double>& v_params() const { return v_params_; }

  /// Evaluates points, tangents and normals; `threads` <= 0 uses all cores.
  SurfaceSamples evaluate(const SplineSurface& s, int threads = 1) const;

  /// Scatter weights of one sample: calls fn(row, free_col, w, wu, wv) for
  /// each active control point, where w = B_i B_j, wu = B_i' B_j,
  /// wv = B_i B_j'.
  template <class Fn>
  void for_each_weight(const SplineSurface& s, std::size_t sample,
                       Fn&& fn) const {
    const int a = static_cast<int>(sample) / n_v_;
    const int c = static_cast<int>(sample) % n_v_;
    const Station& su = u_stations_[a];
    const Station& sv = v_stations_[c];
    const int p = static_cast<int>(su.values.size()) - 1;
    const int q = static_cast<int>(sv.values.size()) - 1;
    for (int i = 0; i <= p; ++i) {
      const int row = su.first + i;
      for (int j = 0; j <= q; ++j) {
        fn(row, s.free_col(sv.first + j), su.values[i] * sv.values[j],
           su.derivs[i] * sv.values[j], su.values[i] * sv.derivs[j]);
      }
    }
  }

 private:
  struct Station {
    int first = 0;  // first active basis index
    std::vector<double> values, derivs;
  };
  int n_u_ = 0, n_v_ = 0;
  std::vector<double> u_params_, v_params_;
  std::vector<Station> u_stations_, v_stations_;
};

/// Uniform-grid sampling: n_u >= 2 axial stations spanning the clamped
/// domain inclusively; n_v >= 3 circumferential stations, excluding the
/// duplicated seam value when periodic.
SurfaceSamples sample_surface(const SplineSurface& s, int n_u, int n_v,
                              int threads = 1);

/// Surface area by Gauss-Legendre quadrature per knot-span cell.
double surface_area(const SplineSurface& s, int quad_order = 4);

/// Minimum 3-D distance over sample pairs that are not parametric
/// neighbors (grid index offsets beyond `window` in either direction, the
/// circumferential one treated cyclically).
double min_nonneighbor_distance(const SurfaceSamples& samples,
                                int window = 2);

}  // namespace cuspfit
