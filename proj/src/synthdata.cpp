#include "cuspfit/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "cuspfit/rng.hpp"

namespace cuspfit {

namespace {
// Inward displacement never exceeds this fraction of the radius, keeping
// opposing leaflet bellies clear of the axis and of each other.
constexpr double kMaxInwardFraction = 0.8;
}  // namespace

SplineSurface synth_valve_surface(const SynthStage& stage) {
  if (!(stage.closure >= 0.0 && stage.closure <= 1.0))
    throw ArgumentError("closure must be in [0, 1]");
  if (!(stage.amplitude >= 0.0))
    throw ArgumentError("amplitude must be >= 0");

  SplineSurface s = make_template(stage.base);
  if (stage.closure == 0.0) return s;

  const double a_r =
      std::min(stage.amplitude, kMaxInwardFraction * stage.base.radius);
  const double a_z = 0.5 * a_r;
  const int rows = stage.base.n_axial;
  const int cols = stage.base.n_circ_free;
  const int lobes = stage.base.leaflet_count;

  for (int i = 0; i < rows; ++i) {
    const double a = static_cast<double>(i) / (rows - 1);
    for (int j = 0; j < cols; ++j) {
      const double theta = 2.0 * M_PI * j / cols;
      // Peaks at the leaflet bellies, zero at the commissures.
      const double belly = std::pow(0.5 * (1.0 - std::cos(lobes * theta)), 2);
      const double f = stage.closure * belly * a * a;
      const Vec3 radial(std::cos(theta), std::sin(theta), 0.0);
      s.free_grid(i, j) += -f * a_r * radial + Vec3(0, 0, -f * a_z);
    }
  }
  return s;
}

namespace {

struct DartResult {
  std::vector<Vec3> points;
};

/// One dart-throwing run at a fixed separation radius. Terminates at
/// saturation (a long run of disk rejections) or at the dart budget.
DartResult throw_darts(const SplineSurface& surface, double radius,
                       int target, Rng& rng, double max_jacobian) {
  const double ulo = surface.knots_axial.domain_min();
  const double uhi = surface.knots_axial.domain_max();
  const double vlo = surface.knots_circ.domain_min();
  const double vhi = surface.knots_circ.domain_max();

  DartResult out;
  const int cap = static_cast<int>(std::ceil(1.15 * target)) + 1;
  const long max_darts = 600L * target + 20000L;
  const int saturation_limit = std::max(2000, 12 * target);

  // Occupancy map with cell edge = radius; neighbor cells need an exact
  // distance check.
  const double cell = radius;
  std::unordered_map<std::int64_t, std::vector<int>> occupancy;
  auto cell_key = [](std::int64_t cx, std::int64_t cy, std::int64_t cz) {
    constexpr std::int64_t kOffset = 1 << 20;
    return (((cx + kOffset) << 42) | ((cy + kOffset) << 21) | (cz + kOffset));
  };
  auto cell_of = [&](const Vec3& p, std::int64_t c[3]) {
    for (int a = 0; a < 3; ++a)
      c[a] = static_cast<std::int64_t>(std::floor(p[a] / cell));
  };
  auto insert_point = [&](const Vec3& p, int idx) {
    std::int64_t c[3];
    cell_of(p, c);
    occupancy[cell_key(c[0], c[1], c[2])].push_back(idx);
  };
  auto conflicts = [&](const Vec3& p) {
    std::int64_t c[3];
    cell_of(p, c);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it =
              occupancy.find(cell_key(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it == occupancy.end()) continue;
          for (int idx : it->second)
            if ((out.points[idx] - p).squaredNorm() < radius * radius)
              return true;
        }
    return false;
  };

  int consecutive_disk_rejects = 0;
  for (long dart = 0; dart < max_darts; ++dart) {
    const double u = rng.uniform(ulo, uhi);
    const double v = rng.uniform(vlo, vhi);
    const Vec3 tu = surface_partial(surface, u, v, 1, 0);
    const Vec3 tv = surface_partial(surface, u, v, 0, 1);
    const double jac = tu.cross(tv).norm();
    if (rng.uniform01() * max_jacobian > jac) continue;  // area weighting

    const Vec3 p = surface_point(surface, u, v);
    if (conflicts(p)) {
      if (++consecutive_disk_rejects >= saturation_limit) break;
      continue;
    }
    consecutive_disk_rejects = 0;
    out.points.push_back(p);
    insert_point(p, static_cast<int>(out.points.size()) - 1);
    if (static_cast<int>(out.points.size()) >= cap) break;
  }
  return out;
}

}  // namespace

PointCloud sample_poisson_disk(const SplineSurface& surface, int target_count,
                               std::uint64_t seed) {
  if (target_count < 1) throw ArgumentError("target_count must be >= 1");
  surface.validate();

  // Probe the area element for the acceptance weighting.
  double max_jac = 0.0;
  {
    const SurfaceSamples probe = sample_surface(surface, 25, 75);
    for (std::size_t k = 0; k < probe.size(); ++k)
      max_jac = std::max(
          max_jac, probe.tangent_u[k].cross(probe.tangent_v[k]).norm());
    max_jac *= 1.05;
    if (max_jac <= 0.0)
      throw ArgumentError("surface area element vanishes everywhere");
  }

  const double area = surface_area(surface);
  double radius = std::sqrt(0.55 * area / (M_PI * target_count));

  std::vector<Vec3> best;
  double best_err = -1.0;
  for (int attempt = 0; attempt < 24; ++attempt) {
    Rng rng(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(attempt));
    DartResult run = throw_darts(surface, radius, target_count, rng, max_jac);
    const int n = static_cast<int>(run.points.size());
    const double err = std::abs(n - target_count) /
                       static_cast<double>(target_count);
    if (best_err < 0.0 || err < best_err) {
      best_err = err;
      best = run.points;
    }
    if (n >= static_cast<int>(std::ceil(0.9 * target_count)) &&
        n <= static_cast<int>(std::floor(1.1 * target_count)))
      break;
    const double ratio = std::max(0.25, std::min(4.0, static_cast<double>(n) /
                                                          target_count));
    radius *= std::sqrt(ratio);
  }

  PointCloud cloud;
  cloud.points = std::move(best);
  return cloud;
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sd,
                              std::uint64_t seed) {
  if (!(sd >= 0.0)) throw ArgumentError("noise sd must be >= 0");
  PointCloud out = cloud;
  if (sd == 0.0) return out;
  Rng rng(seed);
  for (Vec3& p : out.points)
    for (int c = 0; c < 3; ++c) p[c] += sd * rng.normal();
  return out;
}

}  // namespace cuspfit
