#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "mped/point_cloud.hpp"

namespace mped {

enum class BaselineKind { cd, psnr_p2po, psnr_yuv, emd_exact };
enum class ScoreDirection { lower_better, higher_better };

struct BaselineScore {
  BaselineKind kind = BaselineKind::cd;
  double value = 0.0;
  ScoreDirection direction = ScoreDirection::lower_better;
  /// PSNR only: the two clouds matched exactly, so `value` is +inf.
  bool identical = false;
};

std::string_view to_string(BaselineKind kind);

/// Sum of squared nearest-neighbor distances in both directions.
double chamfer_distance(const PointCloud& x, const PointCloud& y);

/// One-sided Chamfer terms: X -> Y sums over x in X, Y -> X over y in Y.
double chamfer_x2y(const PointCloud& x, const PointCloud& y);
double chamfer_y2x(const PointCloud& x, const PointCloud& y);

/// Color PSNR after pairing every y with its Euclidean nearest x. Colors are
/// converted to BT.601 YUV and the channel MSEs are weighted 6:1:1.
/// Throws PreconditionError if either cloud is uncolored.
BaselineScore psnr_yuv(const PointCloud& x, const PointCloud& y, double peak = 255.0);

/// Point-to-point geometry PSNR: the larger of the two one-sided mean squared
/// nearest-neighbor errors against the squared bounding-box diagonal of X.
BaselineScore psnr_p2po(const PointCloud& x, const PointCloud& y);

/// Largest cloud size emd_exact accepts.
inline constexpr std::size_t kEmdMaxPoints = 512;

/// Optimal one-to-one assignment cost under squared Euclidean distance.
/// Requires |X| == |Y| <= kEmdMaxPoints (ArgumentError otherwise).
double emd_exact(const PointCloud& x, const PointCloud& y);

/// Hungarian method on a dense row-major n x n cost matrix. Returns the
/// column assigned to each row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

}  // namespace mped
