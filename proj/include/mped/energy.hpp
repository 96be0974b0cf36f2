#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mped/config.hpp"
#include "mped/point_cloud.hpp"

namespace mped {

/// Zero-potential reference of one neighborhood.
struct CenterPoint {
  Vec3 position{};
  std::optional<Vec3> color;
};

enum class CenterProvenance { high_frequency, union_of_clouds, explicit_list };

/// Neighborhood centers. Colors are present iff they were sampled from a
/// colored cloud. `source_indices` is filled when centers were picked from
/// the source cloud.
struct CenterSet {
  std::vector<Vec3> positions;
  std::optional<std::vector<Vec3>> colors;
  std::vector<std::size_t> source_indices;
  CenterProvenance provenance = CenterProvenance::explicit_list;

  std::size_t size() const noexcept { return positions.size(); }
  CenterPoint at(std::size_t l) const {
    return {positions[l], colors ? std::optional<Vec3>((*colors)[l]) : std::nullopt};
  }

  static CenterSet from_points(std::vector<Vec3> positions,
                               std::optional<std::vector<Vec3>> colors = std::nullopt);
};

/// Field strength g(h) at neighborhood scale K.
///
/// g == 1 when K == 1 or `unit_field` is set; otherwise (h + sigma)^(beta_power - 1),
/// i.e. 1/sqrt(h + sigma) for the default beta_power of 0.5.
double field_strength(double height, int scale, const MetricConfig& config);

/// Mass of a neighbor relative to its center: (sum_j k_j |x_j - c_j| + 1)^alpha
/// for the human variant when both colors exist, 1 otherwise.
double point_mass(const std::optional<Vec3>& center_color, const Vec3* color, const MetricConfig& config);

/// Total potential energy sum_i m_i g_i h_i of one neighborhood. `ids` index
/// into `cloud`; `heights` are the matching ||x_i - c||_p^p.
///
/// Throws PreconditionError for the human variant when exactly one of the
/// center and the cloud carries colors.
double neighborhood_energy(const CenterPoint& center, std::span<const std::uint32_t> ids,
                           std::span<const double> heights, const PointCloud& cloud, int scale,
                           const MetricConfig& config);

/// Outcome of one PED evaluation.
struct ScaleResult {
  int scale = 0;
  /// Sum over centers of |E_source - E_target|.
  double discrepancy = 0.0;
  /// Intrinsic resolution of the source neighborhoods (human variant only).
  std::optional<double> intrinsic_resolution;
  /// discrepancy / (L * IR) for the human variant, discrepancy otherwise.
  double value = 0.0;
};

/// Single-scale potential energy discrepancy over the given centers.
ScaleResult ped_scale(const PointCloud& source, const PointCloud& target, const CenterSet& centers,
                      int scale, const MetricConfig& config);

inline double ped_single_scale(const PointCloud& source, const PointCloud& target,
                               const CenterSet& centers, int scale, const MetricConfig& config) {
  return ped_scale(source, target, centers, scale, config).value;
}

struct EnergyReport {
  Variant variant = Variant::human;
  std::vector<int> scales;
  /// Same order as `scales`.
  std::vector<double> per_scale;
  /// Human variant only; same order as `scales`.
  std::optional<std::vector<double>> intrinsic_resolution;
  double pooled = 0.0;
  std::size_t center_count = 0;
};

/// Multiscale discrepancy: centers per variant, one PED per scale, pooled by
/// the arithmetic mean.
///
/// Human: centers are the high-frequency points of `source`; colors are
/// converted to YUV first when `color_space == yuv`. Machine: centers are
/// source followed by target; colors are ignored.
EnergyReport mped(const PointCloud& source, const PointCloud& target, const MetricConfig& config);

/// Select L = max(1, round(N * center_ratio)) points with the strongest
/// high-pass response: deviation of a point's luma (or position, when the
/// cloud is uncolored) from the mean of its hf_filter_length nearest
/// neighbors. Ordered by response descending, ties by index.
CenterSet select_hf_centers(const PointCloud& cloud, const MetricConfig& config);

/// Per-point high-pass response used by select_hf_centers.
std::vector<double> high_frequency_response(const PointCloud& cloud, const MetricConfig& config);

/// L for a cloud of `n` points.
std::size_t center_count_for(std::size_t n, double center_ratio);

/// Source followed by target, as a center set.
CenterSet union_centers(const PointCloud& source, const PointCloud& target);

namespace reference {

/// Serial oracle: exhaustive KNN and a plain loop over centers.
ScaleResult ped_scale(const PointCloud& source, const PointCloud& target, const CenterSet& centers,
                      int scale, const MetricConfig& config);
EnergyReport mped(const PointCloud& source, const PointCloud& target, const MetricConfig& config);

}  // namespace reference

}  // namespace mped
