#include "cuspfit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cuspfit/nearest.hpp"

namespace cuspfit {

std::vector<double> snnd(const PointCloud& cloud,
                         const SurfaceSamples& samples, double area,
                         int threads) {
  if (cloud.size() == 0) throw ArgumentError("empty point cloud");
  if (samples.size() == 0) throw ArgumentError("no surface samples");
  if (!(area > 0.0)) throw ArgumentError("area must be > 0");
  const double root_area = std::sqrt(area);
  const std::vector<Nearest> nn =
      nearest_all(samples.points, cloud.points, threads);
  std::vector<double> out(cloud.size());
  for (std::size_t l = 0; l < nn.size(); ++l)
    out[l] = std::sqrt(nn[l].dist2) / root_area;
  return out;
}

SnndReport snnd_report(std::vector<double> values, double area,
                       int bin_count) {
  if (values.empty()) throw ArgumentError("snnd_report needs >= 1 value");
  if (bin_count < 1) throw ArgumentError("bin_count must be >= 1");

  SnndReport r;
  r.area = area;
  r.min_value = values[0];
  r.max_value = values[0];
  double sum = 0.0;
  for (double v : values) {
    r.min_value = std::min(r.min_value, v);
    r.max_value = std::max(r.max_value, v);
    sum += v;
  }
  r.mean_value = sum / static_cast<double>(values.size());

  r.bin_edges.resize(bin_count + 1);
  for (int b = 0; b <= bin_count; ++b)
    r.bin_edges[b] = r.max_value * b / bin_count;

  std::vector<int> counts(bin_count, 0);
  for (double v : values) {
    int b = (r.max_value > 0.0)
                ? static_cast<int>(std::floor(v / r.max_value * bin_count))
                : 0;
    b = std::clamp(b, 0, bin_count - 1);  // right-closed last bin
    ++counts[b];
  }
  r.bin_percent.resize(bin_count);
  for (int b = 0; b < bin_count; ++b)
    r.bin_percent[b] =
        100.0 * counts[b] / static_cast<double>(values.size());

  r.values = std::move(values);
  return r;
}

SnndReport evaluate_fit(const SplineSurface& surface, const PointCloud& cloud,
                        int n_u, int n_v, int bin_count, int threads) {
  const SurfaceSamples samples = sample_surface(surface, n_u, n_v, threads);
  const double area = surface_area(surface);
  return snnd_report(snnd(cloud, samples, area, threads), area, bin_count);
}

}  // namespace cuspfit
