#pragma once

#include <cstdint>

#include "cuspfit/pipeline.hpp"

namespace cuspfit {

/// One stage of the analytic valve deformation family. closure = 0 leaves
/// the base template untouched; growing closure folds the leaflet bellies
/// radially inward and downward. The inward displacement is capped below
/// a fraction of the radius, so the family is intersection-free by
/// construction.
struct SynthStage {
  double closure = 0.0;        // in [0, 1]
  double amplitude = 5.0;      // peak displacement at closure 1, same unit as radius
  TemplateSpec base{};
  std::uint64_t seed = 0;      // reserved for downstream sampling
};

/// Ground-truth surface for the stage; deterministic and analytic.
SplineSurface synth_valve_surface(const SynthStage& stage);

/// Poisson-disk point cloud on the surface: parameter-space dart throwing
/// with area-weighted acceptance and a 3-D minimum-separation radius that
/// is auto-tuned until the accepted count is within 10% of target_count.
PointCloud sample_poisson_disk(const SplineSurface& surface, int target_count,
                               std::uint64_t seed);

/// Adds i.i.d. Gaussian noise per coordinate; labels are preserved.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sd,
                              std::uint64_t seed);

}  // namespace cuspfit
