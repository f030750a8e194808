#pragma once

#include "cuspfit/optim.hpp"

namespace cuspfit {

/// Parameters of the deformable valve template: a circular annulus ring at
/// u = 0 from which the leaflet skirt hangs, with a sinusoidally scalloped
/// free edge (leaflet_count lobes, scallop_depth fraction of height).
struct TemplateSpec {
  double radius = 10.0;
  double height = 16.0;
  int leaflet_count = 3;
  int degree_axial = 3;
  int degree_circ = 3;
  int n_axial = 6;       // clamped control rows, annulus -> free edge
  int n_circ_free = 23;  // free periodic control columns
  double scallop_depth = 0.35;

  void validate() const;
};

/// Periodic template surface; control rows are circles of radius `radius`
/// at zero scallop depth, the free edge rises toward the commissures as
/// depth grows.
SplineSurface make_template(const TemplateSpec& spec);

/// Similarity transform x -> scale * R * x + translation.
struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return scale * (rotation * x) + translation; }
};

/// Similarity estimated from surface samples vs cloud: centroid
/// translation, RMS-radius scale, and the rotation taking the surface's
/// annulus-plane normal to the cloud's smallest-variance principal axis
/// (annulus-labeled points when present, whole cloud otherwise; rotation
/// is skipped when the cloud lacks 4 non-coplanar points). Throws
/// AlignmentError when all cloud points coincide.
SimilarityTransform compute_prealign(const SplineSurface& surface,
                                     const PointCloud& cloud);

/// Applies compute_prealign to the control points.
SplineSurface affine_prealign(const SplineSurface& surface,
                              const PointCloud& cloud);

struct Frame {
  std::string label;
  PointCloud cloud;
};
using FrameSequence = std::vector<Frame>;

/// Sequential multi-frame fitting: the template is pre-aligned to the
/// first frame, each later frame starts from the previous result
/// (re-alignment per frame is opt-in). A failed frame aborts the sequence;
/// results up to and including it are returned.
std::vector<FitResult> fit_sequence(const SplineSurface& tmpl,
                                    const FrameSequence& frames,
                                    const FitConfig& config,
                                    bool realign_each_frame = false,
                                    const ProgressFn& progress = {});

}  // namespace cuspfit
