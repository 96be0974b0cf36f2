#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mped/config.hpp"
#include "mped/point_cloud.hpp"

namespace mped {

/// Which center family contributes to the machine-variant loss:
/// x2y uses centers from X, y2x centers from Y, both uses X then Y.
enum class LossDirection { both, x2y, y2x };

struct GradientField {
  double loss = 0.0;
  /// d loss / d y_j for every point of Y.
  std::vector<Vec3> grads;
};

/// Machine-variant MPED of (X, Y) and its gradient with respect to Y.
///
/// KNN memberships are held fixed for the evaluation; the absolute value
/// uses sgn(0) = 0. The multiscale gradient is the mean of the per-scale
/// gradients. With direction == both the loss equals mped(X, Y).pooled
/// exactly. Throws PreconditionError on colored input and ConfigError when
/// the config is not machine-variant with p == 2.
GradientField ped_machine_with_grad(const PointCloud& x, const PointCloud& y, const MetricConfig& config,
                                    LossDirection direction = LossDirection::both);

/// Same loss value without the gradient.
double ped_machine_loss(const PointCloud& x, const PointCloud& y, const MetricConfig& config,
                        LossDirection direction = LossDirection::both);

/// Value-and-gradient surface for host-language bindings. Arrays are
/// row-major n x 3 doubles. The config is validated once at construction.
class MpedLoss {
 public:
  explicit MpedLoss(MetricConfig config);

  const MetricConfig& config() const noexcept { return config_; }

  double loss(std::span<const double> x, std::span<const double> y) const;
  /// Gradient with respect to Y only, flattened like the input.
  std::pair<double, std::vector<double>> loss_and_grad(std::span<const double> x,
                                                       std::span<const double> y) const;

 private:
  MetricConfig config_;
};

/// Convert a row-major n x 3 buffer. Throws ArgumentError on a bad shape or
/// a non-finite entry.
PointCloud cloud_from_rows(std::span<const double> rows);

// ---------------------------------------------------------------------------
// Mutual incidence

enum class IncidenceDirection { x2y, y2x };

/// Binary N x M KNN membership matrix.
///   x2y: b_ij = 1 iff y_j is among the K nearest Y points of x_i.
///   y2x: b_ij = 1 iff x_i is among the K nearest X points of y_j.
struct IncidenceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  IncidenceDirection direction = IncidenceDirection::x2y;
  std::vector<std::uint8_t> entries;

  std::uint8_t at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  std::size_t row_sum(std::size_t i) const;
  std::size_t col_sum(std::size_t j) const;
};

IncidenceMatrix incidence_matrix(const PointCloud& x, const PointCloud& y, int k, IncidenceDirection direction);

/// Closed-form incidence probabilities, assuming every center picks its K
/// neighbors as an independent uniform K-subset.
///   x2y: probability that a given y_j is selected by at least one x_i,
///        1 - ((M-K)/M)^N  (K = 1 for cd).
///   y2x: probability that a given x_i is selected by no y_j,
///        ((N-K)/N)^M      (K = 1 for cd).
/// Throws ArgumentError when K is outside [1, M] (x2y) or [1, N] (y2x).
enum class IncidenceMetric { cd, ped };

double isolated_point_probability(std::size_t n, std::size_t m, int k, IncidenceMetric metric,
                                  IncidenceDirection direction);

// ---------------------------------------------------------------------------
// Graph filtering and descent

/// One explicit step (I - 2 a (D - A)) Y where A is the K-NN adjacency of Y
/// with itself (self included) and D = diag(A 1).
PointCloud refinement_filter_step(const PointCloud& y, int k, double step);

enum class DescentLoss { cd, cd_x2y, cd_y2x, ped, ped_x2y, ped_y2x };

DescentLoss parse_descent_loss(std::string_view name);
std::string_view to_string(DescentLoss loss);

struct DescentOptions {
  DescentLoss loss = DescentLoss::ped;
  std::size_t steps = 100;
  double learning_rate = 0.01;
  /// Base config for the ped* losses; cd* losses force scales = {1}.
  MetricConfig config;
  /// Keep every n-th step (the first and last are always kept).
  std::size_t snapshot_every = 10;
};

struct Snapshot {
  std::size_t step = 0;
  double loss = 0.0;
  PointCloud cloud;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  /// Positions after the final step.
  PointCloud final_cloud;
};

/// Plain gradient descent of Y under the chosen loss component. Throws
/// NumericalError carrying the step index when the loss stops being finite.
Trajectory descent_demo(const PointCloud& x, const PointCloud& y0, const DescentOptions& options);

MetricConfig descent_config(const DescentOptions& options);

/// Write `step_NNNNN.ply` per snapshot plus `trajectory.json` listing
/// {step, loss, file}. Returns the manifest path.
std::filesystem::path write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory,
                                       std::string_view manifest_ref = {});

/// Mean pairwise Euclidean distance (exact, O(N^2)).
double mean_pairwise_distance(const PointCloud& cloud);

}  // namespace mped
