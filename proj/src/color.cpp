#include "mped/color.hpp"

#include "mped/error.hpp"

namespace mped {

Vec3 rgb_to_yuv(const Vec3& rgb) {
  const double r = rgb[0];
  const double g = rgb[1];
  const double b = rgb[2];
  return {
      0.299 * r + 0.587 * g + 0.114 * b,
      -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0,
      0.5 * r - 0.418688 * g - 0.081312 * b + 128.0,
  };
}

PointCloud rgb_to_yuv(const PointCloud& cloud) {
  if (!cloud.has_colors()) throw PreconditionError("rgb_to_yuv: cloud has no colors");
  std::vector<Vec3> yuv;
  yuv.reserve(cloud.size());
  for (const auto& c : cloud.colors()) yuv.push_back(rgb_to_yuv(c));
  return cloud.with_colors(std::move(yuv));
}

}  // namespace mped
