#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cuspfit/types.hpp"

namespace cuspfit {

enum class PointLabel : std::uint8_t {
  unlabeled = 0,
  annulus,
  leaflet_sl,
  leaflet_al,
  leaflet_pl,
};

std::string label_to_string(PointLabel label);
PointLabel label_from_string(const std::string& text);

/// Unstructured 3-D points with optional per-point anatomical labels.
/// `labels` is either empty (all unlabeled) or the same length as `points`.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<PointLabel> labels;

  std::size_t size() const { return points.size(); }
  bool has_labels() const { return !labels.empty(); }
  PointLabel label(std::size_t i) const {
    return has_labels() ? labels[i] : PointLabel::unlabeled;
  }
  std::vector<Vec3> points_with_label(PointLabel l) const;
};

}  // namespace cuspfit
