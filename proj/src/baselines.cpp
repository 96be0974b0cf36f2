#include "mped/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mped/color.hpp"
#include "mped/distortion.hpp"
#include "mped/error.hpp"
#include "mped/knn.hpp"
#include "mped/summation.hpp"

namespace mped {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::cd: return "cd";
    case BaselineKind::psnr_p2po: return "psnr_p2po";
    case BaselineKind::psnr_yuv: return "psnr_yuv";
    case BaselineKind::emd_exact: return "emd_exact";
  }
  return "?";
}

namespace {

double nn_sum(const PointCloud& queries, const PointCloud& reference) {
  const auto nn = knn_search(queries.positions(), reference, 1, 2);
  return compensated_sum(nn.dists);
}

BaselineScore psnr_score(BaselineKind kind, double peak_sq, double mse) {
  BaselineScore s;
  s.kind = kind;
  s.direction = ScoreDirection::higher_better;
  if (mse == 0.0) {
    s.identical = true;
    s.value = std::numeric_limits<double>::infinity();
  } else {
    s.value = 10.0 * std::log10(peak_sq / mse);
  }
  return s;
}

}  // namespace

double chamfer_x2y(const PointCloud& x, const PointCloud& y) { return nn_sum(x, y); }
double chamfer_y2x(const PointCloud& x, const PointCloud& y) { return nn_sum(y, x); }
double chamfer_distance(const PointCloud& x, const PointCloud& y) { return chamfer_x2y(x, y) + chamfer_y2x(x, y); }

BaselineScore psnr_yuv(const PointCloud& x, const PointCloud& y, double peak) {
  if (!x.has_colors() || !y.has_colors()) throw PreconditionError("psnr_yuv needs colors on both clouds");
  if (!(peak > 0.0)) throw ArgumentError("psnr peak must be positive");
  const auto nn = knn_search(y.positions(), x, 1, 2);
  CompensatedSum se[3];
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Vec3 a = rgb_to_yuv(y.color(i));
    const Vec3 b = rgb_to_yuv(x.color(nn.ids[i]));
    for (int c = 0; c < 3; ++c) se[c].add((a[c] - b[c]) * (a[c] - b[c]));
  }
  const double n = static_cast<double>(y.size());
  const double mse = (6.0 * se[0].value() / n + se[1].value() / n + se[2].value() / n) / 8.0;
  return psnr_score(BaselineKind::psnr_yuv, peak * peak, mse);
}

BaselineScore psnr_p2po(const PointCloud& x, const PointCloud& y) {
  const double diag = bounding_box_diagonal(x);
  if (diag == 0.0) throw PreconditionError("psnr_p2po needs a reference cloud with nonzero extent");
  const double mse_xy = chamfer_x2y(x, y) / static_cast<double>(x.size());
  const double mse_yx = chamfer_y2x(x, y) / static_cast<double>(y.size());
  return psnr_score(BaselineKind::psnr_p2po, diag * diag, std::max(mse_xy, mse_yx));
}

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  if (cost.size() != n * n) throw ArgumentError("assignment cost must be n x n");
  if (n == 0) return {};
  // Shortest augmenting path with row/column potentials; 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double emd_exact(const PointCloud& x, const PointCloud& y) {
  if (x.size() != y.size()) throw ArgumentError("emd_exact needs clouds of equal size");
  if (x.size() > kEmdMaxPoints) {
    throw ArgumentError("emd_exact supports at most " + std::to_string(kEmdMaxPoints) + " points, got " +
                        std::to_string(x.size()));
  }
  const std::size_t n = x.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = distance_pow(x.position(i), y.position(j), 2);
  }
  const auto assign = solve_assignment(cost, n);
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) total.add(cost[i * n + assign[i]]);
  return total.value();
}

}  // namespace mped
