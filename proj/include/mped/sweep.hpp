#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mped/config.hpp"
#include "mped/distortion.hpp"
#include "mped/point_cloud.hpp"

namespace mped {

enum class MetricId { mped_human, mped_machine, cd, psnr_yuv, psnr_p2po };

MetricId parse_metric_id(std::string_view name);
std::string_view to_string(MetricId id);

/// Score of `distorted` against `pristine`. The mped ids take their config
/// from `human` / `machine`.
double evaluate_metric_id(MetricId id, const PointCloud& pristine, const PointCloud& distorted,
                          const MetricConfig& human, const MetricConfig& machine);

struct SweepOptions {
  DistortionKind kind = DistortionKind::geometry_gaussian;
  MetricId metric = MetricId::mped_human;
  int levels = 5;
  std::uint64_t seed = 0;
  MetricConfig human_config;
  MetricConfig machine_config;
};

struct SweepReport {
  DistortionKind kind = DistortionKind::geometry_gaussian;
  MetricId metric = MetricId::mped_human;
  /// values[i] is the score at level i + 1.
  std::vector<double> values;
  bool strictly_increasing = false;
  bool strictly_decreasing = false;
  /// Spearman correlation of values against the level index (NaN when the
  /// values are constant).
  double srocc = 0.0;
};

/// Scores levels 1..levels of one distortion kind against the pristine
/// cloud. Levels are evaluated in parallel; the report is independent of
/// thread count. Requires levels >= 3.
SweepReport monotonicity_sweep(const PointCloud& cloud, const SweepOptions& options);

/// One row per (kind, level) with a column per metric; cells are empty where
/// a report is missing.
std::string sweep_csv(const std::vector<SweepReport>& reports, std::string_view manifest_ref = {});

}  // namespace mped
