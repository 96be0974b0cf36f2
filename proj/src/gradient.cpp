#include "mped/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "energy_detail.hpp"
#include "mped/cloud_io.hpp"
#include "mped/error.hpp"
#include "mped/knn.hpp"
#include "mped/summation.hpp"

namespace mped {
namespace {

/// d/dt [g(t) t] for the machine field.
double energy_slope(double t, int scale, const MetricConfig& config) {
  if (config.unit_field || scale == 1) return 1.0;
  const double shifted = t + config.sigma;
  if (config.beta_power == 0.5) return (0.5 * t + config.sigma) / (shifted * std::sqrt(shifted));
  return std::pow(shifted, config.beta_power - 2.0) * (config.beta_power * t + config.sigma);
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_machine(const MetricConfig& config) {
  config.validate();
  if (config.variant != Variant::machine) throw ConfigError("gradient engine needs the machine variant");
  if (config.p != 2) throw ConfigError("gradient engine needs p = 2");
}

void require_uncolored(const PointCloud& x, const PointCloud& y) {
  if (x.has_colors() || y.has_colors()) {
    throw PreconditionError("machine-variant gradient takes uncolored clouds (variant mismatch)");
  }
}

}  // namespace

namespace detail {

MachineEvaluation evaluate_machine(const PointCloud& x, const PointCloud& y, const MetricConfig& config,
                                   LossDirection direction, bool with_grad) {
  const bool use_x = direction != LossDirection::y2x;
  const bool use_y = direction != LossDirection::x2y;
  std::vector<Vec3> centers;
  if (use_x) centers.assign(x.positions().begin(), x.positions().end());
  const std::size_t y_offset = centers.size();
  if (use_y) centers.insert(centers.end(), y.positions().begin(), y.positions().end());

  const KdTree x_tree(x.positions(), config.p);
  const KdTree y_tree(y.positions(), config.p);
  const auto kmax = static_cast<std::size_t>(config.scales.front());
  const auto in_x = x_tree.search(centers, kmax);
  const auto in_y = y_tree.search(centers, kmax);

  const std::size_t count = centers.size();
  const auto n = static_cast<std::ptrdiff_t>(count);
  MachineEvaluation out;
  if (with_grad) out.grads.assign(y.size(), Vec3{0.0, 0.0, 0.0});

  std::vector<double> terms(count);
  std::vector<double> signs(count);
  std::vector<Vec3> member_grad;
  std::vector<Vec3> center_grad;

  for (int scale : config.scales) {
    const std::size_t kx = std::min<std::size_t>(static_cast<std::size_t>(scale), in_x.k);
    const std::size_t ky = std::min<std::size_t>(static_cast<std::size_t>(scale), in_y.k);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < n; ++c) {
      const CenterPoint center{centers[c], std::nullopt};
      const double diff = row_energy(center, in_x, c, x, scale, config) - row_energy(center, in_y, c, y, scale, config);
      terms[c] = std::abs(diff);
      signs[c] = sign_of(diff);
    }
    out.per_scale.push_back(compensated_sum(terms));
    if (!with_grad) continue;

    // Per-center contributions are computed in parallel into private slots
    // and merged below in center order, so the sum is deterministic.
    member_grad.assign(count * ky, Vec3{0.0, 0.0, 0.0});
    center_grad.assign(count, Vec3{0.0, 0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < n; ++c) {
      const double s = signs[c];
      if (s == 0.0) continue;
      const Vec3& cp = centers[c];
      const auto ids_y = in_y.neighbors(c);
      const auto hs_y = in_y.distances(c);
      // |E_X - E_Y| loses s * dE_Y / dy_j through every Y member.
      for (std::size_t slot = 0; slot < ky; ++slot) {
        const double w = -2.0 * s * energy_slope(hs_y[slot], scale, config);
        member_grad[c * ky + slot] = w * (y.position(ids_y[slot]) - cp);
      }
      if (static_cast<std::size_t>(c) >= y_offset) {
        // The center itself is a Y point: it shifts every height in both
        // neighborhoods.
        Vec3 g{0.0, 0.0, 0.0};
        const auto ids_x = in_x.neighbors(c);
        const auto hs_x = in_x.distances(c);
        for (std::size_t slot = 0; slot < kx; ++slot) {
          g += (2.0 * energy_slope(hs_x[slot], scale, config)) * (cp - x.position(ids_x[slot]));
        }
        for (std::size_t slot = 0; slot < ky; ++slot) {
          g += (-2.0 * energy_slope(hs_y[slot], scale, config)) * (cp - y.position(ids_y[slot]));
        }
        center_grad[c] = s * g;
      }
    }

    for (std::size_t c = 0; c < count; ++c) {
      if (signs[c] == 0.0) continue;
      const auto ids_y = in_y.neighbors(c);
      for (std::size_t slot = 0; slot < ky; ++slot) out.grads[ids_y[slot]] += member_grad[c * ky + slot];
      if (c >= y_offset) out.grads[c - y_offset] += center_grad[c];
    }
  }

  out.pooled = pool_scales(out.per_scale);
  if (with_grad) {
    const double inv = 1.0 / static_cast<double>(config.scales.size());
    for (auto& g : out.grads) g = inv * g;
  }
  return out;
}

}  // namespace detail

GradientField ped_machine_with_grad(const PointCloud& x, const PointCloud& y, const MetricConfig& config,
                                    LossDirection direction) {
  require_machine(config);
  require_uncolored(x, y);
  auto eval = detail::evaluate_machine(x, y, config, direction, true);
  return {eval.pooled, std::move(eval.grads)};
}

double ped_machine_loss(const PointCloud& x, const PointCloud& y, const MetricConfig& config,
                        LossDirection direction) {
  config.validate();
  if (config.variant != Variant::machine) throw ConfigError("machine loss needs the machine variant");
  require_uncolored(x, y);
  return detail::evaluate_machine(x, y, config, direction, false).pooled;
}

// ---------------------------------------------------------------------------

PointCloud cloud_from_rows(std::span<const double> rows) {
  if (rows.empty() || rows.size() % 3 != 0) {
    throw ArgumentError("expected a non-empty n x 3 array, got " + std::to_string(rows.size()) + " values");
  }
  std::vector<Vec3> pts(rows.size() / 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int d = 0; d < 3; ++d) {
      const double v = rows[3 * i + d];
      if (!std::isfinite(v)) throw ArgumentError("non-finite value at row " + std::to_string(i));
      pts[i][d] = v;
    }
  }
  return PointCloud(std::move(pts));
}

MpedLoss::MpedLoss(MetricConfig config) : config_(std::move(config)) { require_machine(config_); }

double MpedLoss::loss(std::span<const double> x, std::span<const double> y) const {
  const auto cx = cloud_from_rows(x);
  const auto cy = cloud_from_rows(y);
  return detail::evaluate_machine(cx, cy, config_, LossDirection::both, false).pooled;
}

std::pair<double, std::vector<double>> MpedLoss::loss_and_grad(std::span<const double> x,
                                                               std::span<const double> y) const {
  const auto cx = cloud_from_rows(x);
  const auto cy = cloud_from_rows(y);
  auto eval = detail::evaluate_machine(cx, cy, config_, LossDirection::both, true);
  std::vector<double> flat;
  flat.reserve(3 * eval.grads.size());
  for (const auto& g : eval.grads) flat.insert(flat.end(), g.begin(), g.end());
  return {eval.pooled, std::move(flat)};
}

// ---------------------------------------------------------------------------

std::size_t IncidenceMatrix::row_sum(std::size_t i) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < cols; ++j) s += at(i, j);
  return s;
}

std::size_t IncidenceMatrix::col_sum(std::size_t j) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < rows; ++i) s += at(i, j);
  return s;
}

IncidenceMatrix incidence_matrix(const PointCloud& x, const PointCloud& y, int k, IncidenceDirection direction) {
  IncidenceMatrix b;
  b.rows = x.size();
  b.cols = y.size();
  b.direction = direction;
  b.entries.assign(b.rows * b.cols, 0);
  if (direction == IncidenceDirection::x2y) {
    const auto nbrs = knn_search(x.positions(), y, k, 2);
    for (std::size_t i = 0; i < b.rows; ++i) {
      for (auto j : nbrs.neighbors(i)) b.entries[i * b.cols + j] = 1;
    }
  } else {
    const auto nbrs = knn_search(y.positions(), x, k, 2);
    for (std::size_t j = 0; j < b.cols; ++j) {
      for (auto i : nbrs.neighbors(j)) b.entries[i * b.cols + j] = 1;
    }
  }
  return b;
}

double isolated_point_probability(std::size_t n, std::size_t m, int k, IncidenceMetric metric,
                                  IncidenceDirection direction) {
  if (n == 0 || m == 0) throw ArgumentError("cloud sizes must be positive");
  const std::size_t pool = direction == IncidenceDirection::x2y ? m : n;
  if (k < 1 || static_cast<std::size_t>(k) > pool) {
    throw ArgumentError("K = " + std::to_string(k) + " outside [1, " + std::to_string(pool) + "]");
  }
  const double kk = metric == IncidenceMetric::cd ? 1.0 : static_cast<double>(k);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  if (direction == IncidenceDirection::x2y) return 1.0 - std::pow((dm - kk) / dm, dn);
  return std::pow((dn - kk) / dn, dm);
}

// ---------------------------------------------------------------------------

PointCloud refinement_filter_step(const PointCloud& y, int k, double step) {
  if (!(step > 0.0)) throw ArgumentError("refinement step size must be positive");
  const auto nbrs = knn_search(y.positions(), y, k, 2);
  std::vector<Vec3> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    // Row i of (D - A) Y: degree * y_i minus the sum of its neighbors.
    Vec3 lap = static_cast<double>(nbrs.k) * y.position(i);
    for (auto j : nbrs.neighbors(i)) lap = lap - y.position(j);
    out[i] = y.position(i) - (2.0 * step) * lap;
  }
  return y.with_positions(std::move(out));
}

DescentLoss parse_descent_loss(std::string_view name) {
  if (name == "cd") return DescentLoss::cd;
  if (name == "cd_x2y") return DescentLoss::cd_x2y;
  if (name == "cd_y2x") return DescentLoss::cd_y2x;
  if (name == "ped") return DescentLoss::ped;
  if (name == "ped_x2y") return DescentLoss::ped_x2y;
  if (name == "ped_y2x") return DescentLoss::ped_y2x;
  throw ArgumentError("unknown loss '" + std::string(name) + "'");
}

std::string_view to_string(DescentLoss loss) {
  switch (loss) {
    case DescentLoss::cd: return "cd";
    case DescentLoss::cd_x2y: return "cd_x2y";
    case DescentLoss::cd_y2x: return "cd_y2x";
    case DescentLoss::ped: return "ped";
    case DescentLoss::ped_x2y: return "ped_x2y";
    case DescentLoss::ped_y2x: return "ped_y2x";
  }
  return "?";
}

namespace {

LossDirection direction_of(DescentLoss loss) {
  switch (loss) {
    case DescentLoss::cd_x2y:
    case DescentLoss::ped_x2y: return LossDirection::x2y;
    case DescentLoss::cd_y2x:
    case DescentLoss::ped_y2x: return LossDirection::y2x;
    default: return LossDirection::both;
  }
}

}  // namespace

MetricConfig descent_config(const DescentOptions& options) {
  MetricConfig c = options.config;
  c.variant = Variant::machine;
  c.p = 2;
  if (options.loss == DescentLoss::cd || options.loss == DescentLoss::cd_x2y || options.loss == DescentLoss::cd_y2x) {
    c.scales = {1};
  }
  return c;
}

Trajectory descent_demo(const PointCloud& x, const PointCloud& y0, const DescentOptions& options) {
  if (!(options.learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
  const MetricConfig config = descent_config(options);
  require_machine(config);
  const auto xs = x.without_colors();
  const LossDirection direction = direction_of(options.loss);
  const std::size_t every = std::max<std::size_t>(options.snapshot_every, 1);

  Trajectory traj{{}, y0.without_colors()};
  std::vector<Vec3> pts(y0.positions().begin(), y0.positions().end());
  for (std::size_t step = 0;; ++step) {
    const PointCloud current(pts);
    const bool last = step == options.steps;
    auto eval = detail::evaluate_machine(xs, current, config, direction, !last);
    if (!std::isfinite(eval.pooled)) throw NumericalError("descent diverged: non-finite loss", step);
    if (step % every == 0 || last) traj.snapshots.push_back({step, eval.pooled, current});
    if (last) {
      traj.final_cloud = current;
      break;
    }
    for (std::size_t j = 0; j < pts.size(); ++j) {
      pts[j] = pts[j] - options.learning_rate * eval.grads[j];
      if (!std::isfinite(pts[j][0] + pts[j][1] + pts[j][2])) {
        throw NumericalError("descent diverged: non-finite position", step + 1);
      }
    }
  }
  return traj;
}

std::filesystem::path write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory,
                                       std::string_view manifest_ref) {
  std::filesystem::create_directories(dir);
  nlohmann::json entries = nlohmann::json::array();
  const std::string comment = manifest_ref.empty() ? std::string() : "manifest " + std::string(manifest_ref);
  for (const auto& snap : trajectory.snapshots) {
    char name[32];
    std::snprintf(name, sizeof(name), "step_%05zu.ply", snap.step);
    save_cloud(dir / name, snap.cloud, CloudFormat::ply_ascii, comment);
    entries.push_back({{"step", snap.step}, {"loss", snap.loss}, {"file", name}});
  }
  nlohmann::json doc{{"snapshots", entries}};
  if (!manifest_ref.empty()) doc["manifest"] = manifest_ref;
  const auto path = dir / "trajectory.json";
  write_file_atomic(path, doc.dump(2) + "\n");
  return path;
}

double mean_pairwise_distance(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 2) return 0.0;
  CompensatedSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) acc.add(norm(cloud.position(i) - cloud.position(j)));
  }
  return acc.value() / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace mped
