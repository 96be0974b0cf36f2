#include "mped/knn.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "mped/error.hpp"

namespace mped {
namespace {

constexpr std::size_t kLeafSize = 10;

using Candidate = std::pair<double, std::uint32_t>;  // (distance, reference index)

/// Best k candidates under (distance, index) order, kept sorted.
class CandidateHeap {
 public:
  explicit CandidateHeap(std::size_t k) : k_(k), limit_(empty_limit()), dists_(k), ids_(k) {}

  /// Largest distance that can still enter; offer() needs dist <= limit().
  double limit() const noexcept { return limit_; }

  void offer(double dist, std::uint32_t id) {
    std::size_t i;
    if (size_ == k_) {
      if (!before(dist, id, k_ - 1)) return;
      i = k_ - 1;
    } else {
      i = size_++;
    }
    while (i > 0 && before(dist, id, i - 1)) {
      dists_[i] = dists_[i - 1];
      ids_[i] = ids_[i - 1];
      --i;
    }
    dists_[i] = dist;
    ids_[i] = id;
    if (size_ == k_) limit_ = dists_[k_ - 1];
  }

  void drain_sorted(std::span<std::uint32_t> ids, std::span<double> dists) {
    std::copy_n(ids_.begin(), size_, ids.begin());
    std::copy_n(dists_.begin(), size_, dists.begin());
    size_ = 0;
    limit_ = empty_limit();
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  double empty_limit() const noexcept { return k_ == 0 ? -kInf : kInf; }

  bool before(double dist, std::uint32_t id, std::size_t slot) const noexcept {
    return dist < dists_[slot] || (dist == dists_[slot] && id < ids_[slot]);
  }

  std::size_t k_;
  std::size_t size_ = 0;
  double limit_;
  std::vector<double> dists_;
  std::vector<std::uint32_t> ids_;
};

void check_args(int k, int p) {
  if (k <= 0) throw ArgumentError("knn_search: K must be positive, got " + std::to_string(k));
  if (p != 1 && p != 2) throw ArgumentError("knn_search: p must be 1 or 2");
}

}  // namespace

struct KdTree::Impl {
  struct Node {
    // Leaf when left == kNone: points [begin, end) of `points`.
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = kNone;
    std::uint32_t right = kNone;
    int dim = 0;
    double split = 0.0;
  };
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  int p = 2;
  std::vector<Vec3> points;          // permuted copy
  std::vector<std::uint32_t> index;  // original index of points[i]
  std::vector<Node> nodes;

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<std::uint32_t>& order,
                      std::span<const Vec3> src) {
    const auto id = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back({begin, end, kNone, kNone, 0, 0.0});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = src[order[begin]];
    Vec3 hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      const auto& q = src[order[i]];
      for (int d = 0; d < 3; ++d) {
        lo[d] = std::min(lo[d], q[d]);
        hi[d] = std::max(hi[d], q[d]);
      }
    }
    int dim = 0;
    for (int d = 1; d < 3; ++d) {
      if (hi[d] - lo[d] > hi[dim] - lo[dim]) dim = d;
    }
    if (hi[dim] == lo[dim]) return id;  // all coincide

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return src[a][dim] < src[b][dim]; });
    const double split = src[order[mid]][dim];
    const std::uint32_t left = build(begin, mid, order, src);
    const std::uint32_t right = build(mid, end, order, src);
    nodes[id].left = left;
    nodes[id].right = right;
    nodes[id].dim = dim;
    nodes[id].split = split;
    return id;
  }

  template <int P>
  static double gap(double diff) noexcept {
    return P == 1 ? std::abs(diff) : diff * diff;
  }

  // `off` holds the per-axis gap from q to the node's cell and `bound` their
  // sum, a lower bound on the distance to any point inside the cell.
  template <int P>
  void search(std::uint32_t node_id, const Vec3& q, CandidateHeap& heap, Vec3& off, double bound) const {
    const Node& node = nodes[node_id];
    if (node.left == kNone) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const double d = distance_pow(q, points[i], P);
        if (d <= heap.limit()) heap.offer(d, index[i]);
      }
      return;
    }
    // Left holds coordinates <= split, right holds >= split.
    const double diff = q[node.dim] - node.split;
    const std::uint32_t near = diff < 0.0 ? node.left : node.right;
    const std::uint32_t far = diff < 0.0 ? node.right : node.left;
    search<P>(near, q, heap, off, bound);
    const double saved = off[node.dim];
    const double far_gap = gap<P>(diff);
    const double far_bound = bound - saved + far_gap;
    // Equality still descends: a tie on distance may carry a lower index.
    if (far_bound <= heap.limit()) {
      off[node.dim] = far_gap;
      search<P>(far, q, heap, off, far_bound);
      off[node.dim] = saved;
    }
  }

  void search(const Vec3& q, CandidateHeap& heap) const {
    Vec3 off{0.0, 0.0, 0.0};
    if (p == 1) {
      search<1>(0, q, heap, off, 0.0);
    } else {
      search<2>(0, q, heap, off, 0.0);
    }
  }
};

KdTree::KdTree(std::span<const Vec3> points, int p) : impl_(std::make_unique<Impl>()) {
  if (p != 1 && p != 2) throw ArgumentError("KdTree: p must be 1 or 2");
  if (points.empty()) throw ArgumentError("KdTree: reference set is empty");
  if (points.size() >= Impl::kNone) throw ArgumentError("KdTree: too many points");
  impl_->p = p;
  std::vector<std::uint32_t> order(points.size());
  std::iota(order.begin(), order.end(), 0U);
  impl_->nodes.reserve(2 * points.size() / kLeafSize + 1);
  impl_->build(0, static_cast<std::uint32_t>(points.size()), order, points);
  impl_->points.reserve(points.size());
  for (auto i : order) impl_->points.push_back(points[i]);
  impl_->index = std::move(order);
}

KdTree::~KdTree() = default;
KdTree::KdTree(KdTree&&) noexcept = default;
KdTree& KdTree::operator=(KdTree&&) noexcept = default;

std::size_t KdTree::size() const noexcept { return impl_->points.size(); }
int KdTree::p() const noexcept { return impl_->p; }

void KdTree::query(const Vec3& query, std::size_t k, std::span<std::uint32_t> ids,
                   std::span<double> dists) const {
  k = std::min(k, size());
  CandidateHeap heap(k);
  impl_->search(query, heap);
  heap.drain_sorted(ids, dists);
}

NeighborhoodIndex KdTree::search(std::span<const Vec3> queries, std::size_t k) const {
  NeighborhoodIndex out;
  out.k = std::min(k, size());
  out.ids.resize(queries.size() * out.k);
  out.dists.resize(queries.size() * out.k);
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel
  {
    CandidateHeap heap(out.k);
#pragma omp for schedule(dynamic, 256)
    for (std::ptrdiff_t q = 0; q < n; ++q) {
      impl_->search(queries[q], heap);
      heap.drain_sorted({out.ids.data() + q * out.k, out.k}, {out.dists.data() + q * out.k, out.k});
    }
  }
  return out;
}

NeighborhoodIndex knn_search(std::span<const Vec3> queries, const PointCloud& reference, int k, int p) {
  check_args(k, p);
  const KdTree tree(reference.positions(), p);
  return tree.search(queries, static_cast<std::size_t>(k));
}

namespace reference {

NeighborhoodIndex knn_search(std::span<const Vec3> queries, const PointCloud& reference, int k, int p) {
  check_args(k, p);
  const auto refs = reference.positions();
  NeighborhoodIndex out;
  out.k = std::min<std::size_t>(static_cast<std::size_t>(k), refs.size());
  out.ids.reserve(queries.size() * out.k);
  out.dists.reserve(queries.size() * out.k);
  std::vector<Candidate> all(refs.size());
  for (const auto& q : queries) {
    for (std::size_t j = 0; j < refs.size(); ++j) {
      all[j] = {distance_pow(q, refs[j], p), static_cast<std::uint32_t>(j)};
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(out.k), all.end());
    for (std::size_t j = 0; j < out.k; ++j) {
      out.dists.push_back(all[j].first);
      out.ids.push_back(all[j].second);
    }
  }
  return out;
}

}  // namespace reference

}  // namespace mped
