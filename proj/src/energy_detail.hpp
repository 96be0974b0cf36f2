#pragma once

// Internal helpers shared by the energy and gradient translation units.

#include <cstddef>
#include <span>
#include <vector>

#include "mped/energy.hpp"
#include "mped/gradient.hpp"
#include "mped/knn.hpp"

namespace mped::detail {

/// Energy of row `row` of `nbrs`, using its first min(scale, nbrs.k) columns.
/// Does not check color consistency.
double row_energy(const CenterPoint& center, const NeighborhoodIndex& nbrs, std::size_t row,
                  const PointCloud& cloud, int scale, const MetricConfig& config);

/// Throws PreconditionError when the human variant sees one-sided colors.
void check_color_consistency(const PointCloud& source, const PointCloud& target, const CenterSet& centers,
                             const MetricConfig& config);

/// One scale over precomputed neighborhoods (queried at scale >= `scale`).
/// Per-center terms are evaluated in parallel and reduced serially in center
/// order, so the result does not depend on the thread count.
ScaleResult scale_from_neighborhoods(const PointCloud& source, const PointCloud& target,
                                     const CenterSet& centers, const NeighborhoodIndex& in_source,
                                     const NeighborhoodIndex& in_target, int scale, const MetricConfig& config);

/// Serial twin of scale_from_neighborhoods.
ScaleResult scale_from_neighborhoods_serial(const PointCloud& source, const PointCloud& target,
                                            const CenterSet& centers, const NeighborhoodIndex& in_source,
                                            const NeighborhoodIndex& in_target, int scale,
                                            const MetricConfig& config);

/// Arithmetic mean of the per-scale values, summed in scale order.
double pool_scales(std::span<const double> per_scale);

/// High-pass response given each point's neighbors within its own cloud.
std::vector<double> hf_response_from(const PointCloud& cloud, const NeighborhoodIndex& self_nbrs,
                                     std::size_t filter_length);

/// Top-L indices by response, ties by index.
std::vector<std::size_t> top_responses(std::span<const double> response, std::size_t count);

struct MachineEvaluation {
  std::vector<double> per_scale;
  double pooled = 0.0;
  /// Empty unless requested.
  std::vector<Vec3> grads;
};

/// Machine-variant evaluation over uncolored clouds. Centers are X, Y or X
/// followed by Y depending on `direction`. The gradient (w.r.t. Y) needs p == 2.
MachineEvaluation evaluate_machine(const PointCloud& x, const PointCloud& y, const MetricConfig& config,
                                   LossDirection direction, bool with_grad);

CenterSet centers_at(const PointCloud& cloud, std::span<const std::size_t> indices, CenterProvenance provenance);

}  // namespace mped::detail
