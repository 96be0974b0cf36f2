#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mped/point_cloud.hpp"

namespace mped {

enum class DistortionKind { geometry_gaussian, color_gaussian, downsample, octree_quantize, combined };

DistortionKind parse_distortion_kind(std::string_view name);
std::string_view to_string(DistortionKind kind);

/// One synthetic degradation. Level 0 is the identity; severity grows with
/// level. `parameter` overrides the level ladder (noise sigma, keep ratio or
/// quantization step, depending on the kind).
struct DistortionSpec {
  DistortionKind kind = DistortionKind::geometry_gaussian;
  int level = 1;
  std::uint64_t seed = 0;
  std::optional<double> parameter;
};

/// Ladder value for a kind and level, given the cloud's bounding-box
/// diagonal:
///   geometry_gaussian  sigma = 0.004 * diag * 2^(level-1)
///   color_gaussian     sigma = 4 * 2^(level-1)  (8-bit units)
///   downsample         keep  = 1 - 0.15 * level
///   octree_quantize    step  = 0.01 * diag * 2^(level-1)
double distortion_parameter(DistortionKind kind, int level, double diagonal);

/// Deterministic for a given spec. Color kinds need a colored cloud
/// (PreconditionError otherwise). `combined` applies geometry then color
/// noise at the same level.
PointCloud apply_distortion(const PointCloud& cloud, const DistortionSpec& spec);

double bounding_box_diagonal(const PointCloud& cloud);

/// Colored test surfaces: 0 = sphere, 1 = torus, 2 = cube shell. Colors vary
/// smoothly with stripes so the cloud has high-frequency content.
PointCloud synthetic_colored_cloud(int shape, std::size_t n, std::uint64_t seed);

}  // namespace mped
