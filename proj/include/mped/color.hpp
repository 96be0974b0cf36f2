#pragma once

#include "mped/point_cloud.hpp"

namespace mped {

/// BT.601 full-range RGB -> YUV (JFIF matrix). Y spans [0,255] for RGB in
/// [0,255]; U and V are centered at 128 and are not clamped.
Vec3 rgb_to_yuv(const Vec3& rgb);

/// Converts every color of the cloud. Throws PreconditionError when the
/// cloud has no colors.
PointCloud rgb_to_yuv(const PointCloud& cloud);

/// BT.601 luma of an RGB triple.
inline double luma(const Vec3& rgb) { return 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]; }

}  // namespace mped
