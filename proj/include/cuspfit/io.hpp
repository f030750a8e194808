#pragma once

#include <map>
#include <string>

#include "cuspfit/metrics.hpp"
#include "cuspfit/pipeline.hpp"

namespace cuspfit {

/// Canonical shortest-round-trip formatting used by every writer, so
/// save -> load -> save reproduces files byte for byte.
std::string format_double(double x);

/// Point-cloud CSV: one `x,y,z[,label]` row per point, `#` comments and
/// blank lines ignored. Parse failures carry the 1-based line number.
PointCloud load_point_cloud(const std::string& path);
void save_point_cloud(const PointCloud& cloud, const std::string& path);

/// Native surface format: plain text with degrees, knot vectors, grid
/// dimensions and row-major control points.
SplineSurface load_surface(const std::string& path);
void save_surface(const SplineSurface& surface, const std::string& path);

/// Wavefront OBJ quad mesh on an n_u x n_v sample grid; the seam is
/// closed by wrapping faces when the surface is periodic.
void save_quad_mesh(const SplineSurface& surface, const std::string& path,
                    int n_u = 40, int n_v = 120);

void save_loss_history_csv(const std::vector<HistoryEntry>& history,
                           const std::string& path);

void save_snnd_values_csv(const SnndReport& report, const std::string& path);
void save_snnd_histogram_csv(const SnndReport& report,
                             const std::string& path);

struct FrameSummary {
  std::string label;
  double min_value = 0.0;
  double max_value = 0.0;
  double mean_value = 0.0;
};
void save_snnd_summary_csv(const std::vector<FrameSummary>& rows,
                           const std::string& path);

/// Plain-text gradient dump, one `i j gx gy gz` row per control point.
void save_gradient_grid(const GradientGrid& grad, const std::string& path);

/// Manifest of a frame sequence: `<label> <cloud-path>` per line, paths
/// relative to the manifest directory, `#` comments ignored.
FrameSequence load_manifest(const std::string& path);

/// Flat `key = value` configuration file; `#` comments ignored.
/// Unknown keys are rejected by apply_config.
std::map<std::string, std::string> load_key_value(const std::string& path);

/// Applies config keys onto a FitConfig; returns the keys consumed.
void apply_config(const std::map<std::string, std::string>& kv,
                  FitConfig* config);

}  // namespace cuspfit
