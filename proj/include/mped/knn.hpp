#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mped/point_cloud.hpp"

namespace mped {

/// ||a - b||_p^p for p in {1, 2}. Both the tree search and the exhaustive
/// scan go through this function, so they agree bit for bit.
inline double distance_pow(const Vec3& a, const Vec3& b, int p) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  if (p == 1) return std::abs(dx) + std::abs(dy) + std::abs(dz);
  return dx * dx + dy * dy + dz * dz;
}

/// K nearest reference points for each of a list of queries.
///
/// Rows are ordered by (distance, reference index) ascending. Distances are
/// stored as ||.||_p^p. `k` is already clamped to the reference size.
struct NeighborhoodIndex {
  std::size_t k = 0;
  std::vector<std::uint32_t> ids;
  std::vector<double> dists;

  std::size_t query_count() const noexcept { return k == 0 ? 0 : ids.size() / k; }
  std::span<const std::uint32_t> neighbors(std::size_t q) const noexcept {
    return {ids.data() + q * k, k};
  }
  std::span<const double> distances(std::size_t q) const noexcept { return {dists.data() + q * k, k}; }
};

/// Static kd-tree over a copy of the reference positions.
class KdTree {
 public:
  KdTree(std::span<const Vec3> points, int p);
  ~KdTree();
  KdTree(KdTree&&) noexcept;
  KdTree& operator=(KdTree&&) noexcept;

  std::size_t size() const noexcept;
  int p() const noexcept;

  /// Writes min(k, size()) neighbors of `query` to the output spans.
  void query(const Vec3& query, std::size_t k, std::span<std::uint32_t> ids,
             std::span<double> dists) const;

  /// Batched query, parallel over queries.
  NeighborhoodIndex search(std::span<const Vec3> queries, std::size_t k) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// KNN via the kd-tree. Throws ArgumentError for K <= 0 or p not in {1,2}.
NeighborhoodIndex knn_search(std::span<const Vec3> queries, const PointCloud& reference, int k, int p);

namespace reference {

/// Exhaustive O(N*M) scan with the same ordering rule. Serial; kept as the
/// oracle for the tree search.
NeighborhoodIndex knn_search(std::span<const Vec3> queries, const PointCloud& reference, int k, int p);

}  // namespace reference

}  // namespace mped
