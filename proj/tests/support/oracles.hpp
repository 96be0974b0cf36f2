#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's kd-tree or energy kernels.

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "mped/config.hpp"
#include "mped/gradient.hpp"
#include "mped/point_cloud.hpp"

namespace mped::testing {

std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double extent = 1.0);
PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, bool colored, double extent = 1.0);

struct BruteNeighbors {
  std::vector<std::size_t> ids;
  std::vector<double> heights;
};

/// Full sort of every point by (||q - x||_p^p, index); first min(k, N) kept.
BruteNeighbors brute_knn(const Vec3& q, const PointCloud& cloud, std::size_t k, int p);

struct OracleCenter {
  Vec3 position;
  std::optional<Vec3> color;
};

/// Textbook single-scale PED with std::pow everywhere.
double oracle_ped(const PointCloud& source, const PointCloud& target, const std::vector<OracleCenter>& centers,
                  int k, const MetricConfig& config);

/// Machine loss over the chosen center family, mean over scales.
double oracle_machine_loss(const PointCloud& x, const PointCloud& y, const MetricConfig& config,
                           LossDirection direction = LossDirection::both);

double oracle_chamfer(const PointCloud& x, const PointCloud& y);

/// Everything the machine loss treats as piecewise constant: neighbor sets
/// per center and scale, and the sign of each energy difference.
std::vector<long long> machine_signature(const PointCloud& x, const PointCloud& y, const MetricConfig& config);

struct FdComponent {
  std::size_t point;
  int axis;
  double analytic;
  double numeric;
  bool flips;
};

/// Central differences of oracle_machine_loss in every coordinate of Y.
std::vector<FdComponent> finite_difference_check(const PointCloud& x, const PointCloud& y,
                                                 const MetricConfig& config, const std::vector<Vec3>& analytic,
                                                 double step);

/// Fraction of trials in which the tracked point is selected (x2y) or left
/// unselected (y2x) when every center picks an independent uniform K-subset.
double selection_model_frequency(std::size_t n, std::size_t m, std::size_t k, IncidenceDirection direction,
                                 std::size_t trials, std::mt19937_64& rng);

/// Same event measured on uniformly random clouds in the unit cube, averaged
/// over all points of each trial.
double spatial_frequency(std::size_t n, std::size_t m, std::size_t k, IncidenceDirection direction,
                         std::size_t trials, std::mt19937_64& rng);

/// Dense (I - 2a(D - A)) Y with A the K-NN adjacency including self.
std::vector<Vec3> dense_filter_step(const PointCloud& y, std::size_t k, double step);

/// Hand-rolled Pearson over plain loops, for fixtures.
double oracle_pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mped::testing
