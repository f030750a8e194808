#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstddef>
#include <vector>

namespace cuspfit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Dense (axial rows x circumferential columns) grid of 3-D vectors,
/// row-major storage. Used for control points and for gradients.
struct VecGrid {
  int rows = 0;
  int cols = 0;
  std::vector<Vec3> data;

  VecGrid() = default;
  VecGrid(int r, int c)
      : rows(r), cols(c),
        data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c),
             Vec3::Zero()) {}

  Vec3& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  const Vec3& operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  std::size_t size() const { return data.size(); }
  bool same_shape(const VecGrid& o) const {
    return rows == o.rows && cols == o.cols;
  }
  void set_zero() {
    for (auto& v : data) v.setZero();
  }
};

/// Dense scalar grid with the same layout as VecGrid.
struct ScalarGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  ScalarGrid() = default;
  ScalarGrid(int r, int c)
      : rows(r), cols(c),
        data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
};

}  // namespace cuspfit
