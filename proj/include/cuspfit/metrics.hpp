#pragma once

#include "cuspfit/losses.hpp"

namespace cuspfit {

/// Scale-normalized nearest-neighbor distance per cloud point: unsquared
/// distance to the closest surface sample divided by sqrt(area).
std::vector<double> snnd(const PointCloud& cloud,
                         const SurfaceSamples& samples, double area,
                         int threads = 1);

/// Summary statistics and histogram of a set of sNND values. Bins are
/// uniform over [0, max]; every bin is half-open except the last, which
/// is right-closed so the maximum lands inside.
struct SnndReport {
  std::vector<double> values;
  double min_value = 0.0;
  double max_value = 0.0;
  double mean_value = 0.0;
  double area = 0.0;
  std::vector<double> bin_edges;    // bin_count + 1
  std::vector<double> bin_percent;  // bin_count, sums to 100
};

SnndReport snnd_report(std::vector<double> values, double area,
                       int bin_count = 20);

/// End-to-end report for a fitted surface against a cloud.
SnndReport evaluate_fit(const SplineSurface& surface, const PointCloud& cloud,
                        int n_u = 40, int n_v = 120, int bin_count = 20,
                        int threads = 1);

}  // namespace cuspfit
