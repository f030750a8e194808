#include "cuspfit/pipeline.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cuspfit {

void TemplateSpec::validate() const {
  if (!(radius > 0.0) || !(height > 0.0))
    throw ArgumentError("template radius and height must be > 0");
  if (leaflet_count < 1) throw ArgumentError("leaflet_count must be >= 1");
  if (!(scallop_depth >= 0.0 && scallop_depth < 1.0))
    throw ArgumentError("scallop_depth must be in [0, 1)");
  if (degree_axial < 1 || degree_circ < 1)
    throw ArgumentError("template degrees must be >= 1");
  if (n_axial < degree_axial + 1)
    throw ArgumentError("n_axial must be >= degree_axial + 1");
  if (n_circ_free < degree_circ + 1)
    throw ArgumentError("n_circ_free must be >= degree_circ + 1");
}

SplineSurface make_template(const TemplateSpec& spec) {
  spec.validate();
  SplineSurface s = SplineSurface::periodic(
      spec.degree_axial, spec.degree_circ, spec.n_axial, spec.n_circ_free);

  // Row i sits at axial fraction a in [0, 1]; the scallop term raises the
  // skirt toward the commissures with a quadratic taper so the annulus row
  // stays an exact planar circle.
  for (int i = 0; i < spec.n_axial; ++i) {
    const double a = static_cast<double>(i) / (spec.n_axial - 1);
    for (int j = 0; j < spec.n_circ_free; ++j) {
      const double theta = 2.0 * M_PI * j / spec.n_circ_free;
      const double w =
          0.5 * (1.0 + std::cos(spec.leaflet_count * theta));  // 1 at commissures
      const double z = -spec.height * a +
                       spec.height * spec.scallop_depth * w * a * a;
      s.free_grid(i, j) = Vec3(spec.radius * std::cos(theta),
                               spec.radius * std::sin(theta), z);
    }
  }
  return s;
}

namespace {

struct CloudStats {
  Vec3 centroid = Vec3::Zero();
  double rms = 0.0;
};

CloudStats stats_of(const std::vector<Vec3>& pts) {
  CloudStats s;
  for (const Vec3& p : pts) s.centroid += p;
  s.centroid /= static_cast<double>(pts.size());
  double acc = 0.0;
  for (const Vec3& p : pts) acc += (p - s.centroid).squaredNorm();
  s.rms = std::sqrt(acc / static_cast<double>(pts.size()));
  return s;
}

Eigen::Matrix3d covariance_of(const std::vector<Vec3>& pts,
                              const Vec3& centroid) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  for (const Vec3& p : pts) {
    const Vec3 d = p - centroid;
    c += d * d.transpose();
  }
  return c / static_cast<double>(pts.size());
}

/// Smallest-variance principal axis; empty optional when the set is too
/// flat-degenerate (collinear or coincident) to define a plane normal.
bool smallest_axis(const std::vector<Vec3>& pts, const Vec3& centroid,
                   Vec3* axis) {
  const Eigen::Matrix3d cov = covariance_of(pts, centroid);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d ev = es.eigenvalues();  // ascending
  if (ev[1] <= 1e-12 * std::max(ev[2], 1e-300)) return false;  // collinear
  *axis = es.eigenvectors().col(0);
  return true;
}

bool has_noncoplanar_points(const std::vector<Vec3>& pts,
                            const Vec3& centroid) {
  if (pts.size() < 4) return false;
  const Eigen::Matrix3d cov = covariance_of(pts, centroid);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d ev = es.eigenvalues();
  return ev[0] > 1e-12 * std::max(ev[2], 1e-300);
}

Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  const Vec3 f = from.normalized();
  Vec3 t = to.normalized();
  if (f.dot(t) < 0.0) t = -t;  // axis sign is arbitrary; take the near side
  const Vec3 axis = f.cross(t);
  const double s = axis.norm();
  const double c = f.dot(t);
  if (s < 1e-15) return Mat3::Identity();
  const Vec3 a = axis / s;
  Eigen::AngleAxisd rot(std::atan2(s, c), a);
  return rot.toRotationMatrix();
}

}  // namespace

SimilarityTransform compute_prealign(const SplineSurface& surface,
                                     const PointCloud& cloud) {
  if (cloud.size() == 0) throw ArgumentError("empty point cloud");

  const SurfaceSamples samples = sample_surface(surface, 40, 120);
  const CloudStats ss = stats_of(samples.points);
  const CloudStats cs = stats_of(cloud.points);
  if (cs.rms <= 1e-12)
    throw AlignmentError("all cloud points coincide; alignment undefined");

  SimilarityTransform T;
  T.scale = cs.rms / ss.rms;

  // Template axis from the annulus boundary row; cloud axis from annulus
  // labels when present, otherwise the whole cloud.
  std::vector<Vec3> bnd;
  for (std::size_t k = 0; k < samples.size(); ++k)
    if (samples.boundary[k]) bnd.push_back(samples.points[k]);

  const std::vector<Vec3> ann = cloud.points_with_label(PointLabel::annulus);
  const std::vector<Vec3>& axis_pts = ann.size() >= 3 ? ann : cloud.points;
  const CloudStats axis_stats = stats_of(axis_pts);

  if (has_noncoplanar_points(cloud.points, cs.centroid)) {
    Vec3 axis_s, axis_q;
    if (smallest_axis(bnd, stats_of(bnd).centroid, &axis_s) &&
        smallest_axis(axis_pts, axis_stats.centroid, &axis_q)) {
      T.rotation = rotation_between(axis_s, axis_q);
    }
  }
  T.translation = cs.centroid - T.scale * (T.rotation * ss.centroid);
  return T;
}

SplineSurface affine_prealign(const SplineSurface& surface,
                              const PointCloud& cloud) {
  const SimilarityTransform T = compute_prealign(surface, cloud);
  SplineSurface out = surface;
  for (Vec3& p : out.free_grid.data) p = T.apply(p);
  return out;
}

std::vector<FitResult> fit_sequence(const SplineSurface& tmpl,
                                    const FrameSequence& frames,
                                    const FitConfig& config,
                                    bool realign_each_frame,
                                    const ProgressFn& progress) {
  if (frames.empty()) throw ArgumentError("frame sequence is empty");
  std::vector<FitResult> results;
  results.reserve(frames.size());

  SplineSurface current = tmpl;
  for (std::size_t r = 0; r < frames.size(); ++r) {
    if (r == 0 || realign_each_frame)
      current = affine_prealign(current, frames[r].cloud);
    FitResult res = fit_single(current, frames[r].cloud, config, progress);
    const bool failed = res.status == FitStatus::failed_degenerate;
    current = res.surface;
    results.push_back(std::move(res));
    if (failed) break;
  }
  return results;
}

}  // namespace cuspfit
