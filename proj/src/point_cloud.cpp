#include "cuspfit/point_cloud.hpp"

#include "cuspfit/errors.hpp"

namespace cuspfit {

std::string label_to_string(PointLabel label) {
  switch (label) {
    case PointLabel::unlabeled: return "unlabeled";
    case PointLabel::annulus: return "annulus";
    case PointLabel::leaflet_sl: return "leaflet:SL";
    case PointLabel::leaflet_al: return "leaflet:AL";
    case PointLabel::leaflet_pl: return "leaflet:PL";
  }
  throw ArgumentError("unknown point label");
}

PointLabel label_from_string(const std::string& text) {
  if (text == "unlabeled" || text.empty()) return PointLabel::unlabeled;
  if (text == "annulus") return PointLabel::annulus;
  if (text == "leaflet:SL") return PointLabel::leaflet_sl;
  if (text == "leaflet:AL") return PointLabel::leaflet_al;
  if (text == "leaflet:PL") return PointLabel::leaflet_pl;
  throw ArgumentError("unknown point label '" + text + "'");
}

std::vector<Vec3> PointCloud::points_with_label(PointLabel l) const {
  std::vector<Vec3> out;
  if (!has_labels()) return out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (labels[i] == l) out.push_back(points[i]);
  return out;
}

}  // namespace cuspfit
