#include "mped/point_cloud.hpp"

#include <algorithm>
#include <string>

#include "mped/error.hpp"

namespace mped {
namespace {

void check_finite(const std::vector<Vec3>& values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (double v : values[i]) {
      if (!std::isfinite(v)) {
        throw ArgumentError(std::string("non-finite ") + what + " at point " + std::to_string(i));
      }
    }
  }
}

}  // namespace

PointCloud::PointCloud(std::vector<Vec3> positions) : positions_(std::move(positions)) {
  if (positions_.empty()) throw ArgumentError("point cloud must contain at least one point");
  check_finite(positions_, "coordinate");
}

PointCloud::PointCloud(std::vector<Vec3> positions, std::vector<Vec3> colors)
    : PointCloud(std::move(positions)) {
  if (colors.size() != positions_.size()) {
    throw ArgumentError("color count " + std::to_string(colors.size()) + " does not match point count " +
                        std::to_string(positions_.size()));
  }
  check_finite(colors, "color");
  colors_ = std::move(colors);
}

PointCloud PointCloud::with_positions(std::vector<Vec3> positions) const {
  if (colors_) return PointCloud(std::move(positions), *colors_);
  return PointCloud(std::move(positions));
}

PointCloud PointCloud::with_colors(std::vector<Vec3> colors) const {
  return PointCloud(positions_, std::move(colors));
}

PointCloud normalize_unit_sphere(const PointCloud& cloud) {
  Vec3 centroid{0.0, 0.0, 0.0};
  for (const auto& p : cloud.positions()) centroid += p;
  centroid = (1.0 / static_cast<double>(cloud.size())) * centroid;

  std::vector<Vec3> out;
  out.reserve(cloud.size());
  double max_norm = 0.0;
  for (const auto& p : cloud.positions()) {
    out.push_back(p - centroid);
    max_norm = std::max(max_norm, norm(out.back()));
  }
  if (max_norm > 0.0) {
    for (auto& p : out) p = (1.0 / max_norm) * p;
  }
  return cloud.with_positions(std::move(out));
}

PointCloud concatenate(const PointCloud& a, const PointCloud& b) {
  std::vector<Vec3> pos(a.positions().begin(), a.positions().end());
  pos.insert(pos.end(), b.positions().begin(), b.positions().end());
  if (a.has_colors() && b.has_colors()) {
    std::vector<Vec3> col(a.colors().begin(), a.colors().end());
    col.insert(col.end(), b.colors().begin(), b.colors().end());
    return PointCloud(std::move(pos), std::move(col));
  }
  return PointCloud(std::move(pos));
}

}  // namespace mped
