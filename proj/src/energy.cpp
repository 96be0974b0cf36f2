#include "mped/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "energy_detail.hpp"
#include "mped/color.hpp"
#include "mped/error.hpp"
#include "mped/summation.hpp"

namespace mped {

CenterSet CenterSet::from_points(std::vector<Vec3> positions, std::optional<std::vector<Vec3>> colors) {
  if (positions.empty()) throw ArgumentError("center set must not be empty");
  if (colors && colors->size() != positions.size()) throw ArgumentError("center colors do not match centers");
  CenterSet c;
  c.positions = std::move(positions);
  c.colors = std::move(colors);
  c.provenance = CenterProvenance::explicit_list;
  return c;
}

double field_strength(double height, int scale, const MetricConfig& config) {
  if (config.unit_field || scale == 1) return 1.0;
  if (config.beta_power == 0.5) return 1.0 / std::sqrt(height + config.sigma);
  return std::pow(height + config.sigma, config.beta_power - 1.0);
}

double point_mass(const std::optional<Vec3>& center_color, const Vec3* color, const MetricConfig& config) {
  if (config.variant != Variant::human || !center_color || color == nullptr) return 1.0;
  double diff = 0.0;
  for (int j = 0; j < 3; ++j) diff += config.color_weights[j] * std::abs((*color)[j] - (*center_color)[j]);
  const double d_color = diff + 1.0;
  return config.alpha == 0.5 ? std::sqrt(d_color) : std::pow(d_color, config.alpha);
}

namespace {

double energy_of(const CenterPoint& center, std::span<const std::uint32_t> ids, std::span<const double> heights,
                 const PointCloud& cloud, int scale, const MetricConfig& config) {
  const bool colored = config.variant == Variant::human && cloud.has_colors();
  double energy = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double h = heights[i];
    const double m = colored ? point_mass(center.color, &cloud.color(ids[i]), config) : 1.0;
    energy += m * field_strength(h, scale, config) * h;
  }
  return energy;
}

void check_scale(int scale) {
  if (scale <= 0) throw ArgumentError("neighborhood size K must be positive, got " + std::to_string(scale));
}

}  // namespace

double neighborhood_energy(const CenterPoint& center, std::span<const std::uint32_t> ids,
                           std::span<const double> heights, const PointCloud& cloud, int scale,
                           const MetricConfig& config) {
  if (ids.size() != heights.size()) throw ArgumentError("neighbor ids and heights differ in length");
  if (config.variant == Variant::human && center.color.has_value() != cloud.has_colors()) {
    throw PreconditionError("human variant needs colors on both the center and its neighbors, or on neither");
  }
  return energy_of(center, ids, heights, cloud, scale, config);
}

namespace detail {

double row_energy(const CenterPoint& center, const NeighborhoodIndex& nbrs, std::size_t row,
                  const PointCloud& cloud, int scale, const MetricConfig& config) {
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(scale), nbrs.k);
  return energy_of(center, nbrs.neighbors(row).first(k), nbrs.distances(row).first(k), cloud, scale, config);
}

void check_color_consistency(const PointCloud& source, const PointCloud& target, const CenterSet& centers,
                             const MetricConfig& config) {
  if (config.variant != Variant::human) return;
  if (source.has_colors() != target.has_colors()) {
    throw PreconditionError("human variant needs both clouds colored or both uncolored");
  }
  if (centers.colors.has_value() != source.has_colors()) {
    throw PreconditionError("human variant needs center colors exactly when the clouds are colored");
  }
}

namespace {

template <bool Parallel>
ScaleResult scale_impl(const PointCloud& source, const PointCloud& target, const CenterSet& centers,
                       const NeighborhoodIndex& in_source, const NeighborhoodIndex& in_target, int scale,
                       const MetricConfig& config) {
  const std::size_t count = centers.size();
  std::vector<double> terms(count);
  std::vector<double> height_sums(count);
  const std::size_t k_src = std::min<std::size_t>(static_cast<std::size_t>(scale), in_source.k);
  const auto n = static_cast<std::ptrdiff_t>(count);

#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t l = 0; l < n; ++l) {
    const CenterPoint c = centers.at(static_cast<std::size_t>(l));
    const double e_src = row_energy(c, in_source, l, source, scale, config);
    const double e_tgt = row_energy(c, in_target, l, target, scale, config);
    terms[l] = std::abs(e_src - e_tgt);
    double hs = 0.0;
    for (double h : in_source.distances(l).first(k_src)) hs += h;
    height_sums[l] = hs;
  }

  ScaleResult r;
  r.scale = scale;
  r.discrepancy = compensated_sum(terms);
  r.value = r.discrepancy;
  if (config.variant == Variant::human) {
    const double denom = static_cast<double>(count) * static_cast<double>(k_src);
    const double mean_height = compensated_sum(height_sums) / denom;
    const double ir = config.beta_power == 0.5 ? std::sqrt(mean_height) : std::pow(mean_height, config.beta_power);
    r.intrinsic_resolution = ir;
    // Degenerate source neighborhoods (all heights zero) skip the IR factor.
    r.value = r.discrepancy / (static_cast<double>(count) * (ir > 0.0 ? ir : 1.0));
  }
  return r;
}

}  // namespace

ScaleResult scale_from_neighborhoods(const PointCloud& source, const PointCloud& target, const CenterSet& centers,
                                     const NeighborhoodIndex& in_source, const NeighborhoodIndex& in_target,
                                     int scale, const MetricConfig& config) {
  return scale_impl<true>(source, target, centers, in_source, in_target, scale, config);
}

ScaleResult scale_from_neighborhoods_serial(const PointCloud& source, const PointCloud& target,
                                            const CenterSet& centers, const NeighborhoodIndex& in_source,
                                            const NeighborhoodIndex& in_target, int scale,
                                            const MetricConfig& config) {
  return scale_impl<false>(source, target, centers, in_source, in_target, scale, config);
}

double pool_scales(std::span<const double> per_scale) {
  double sum = 0.0;
  for (double v : per_scale) sum += v;
  return sum / static_cast<double>(per_scale.size());
}

std::vector<double> hf_response_from(const PointCloud& cloud, const NeighborhoodIndex& self_nbrs,
                                     std::size_t filter_length) {
  const std::size_t n = cloud.size();
  std::vector<double> response(n, 0.0);
  const bool colored = cloud.has_colors();
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 mean_pos{0.0, 0.0, 0.0};
    double mean_luma = 0.0;
    std::size_t used = 0;
    bool skipped_self = false;
    for (auto j : self_nbrs.neighbors(i)) {
      if (!skipped_self && j == i) {
        skipped_self = true;
        continue;
      }
      if (used == filter_length) break;
      mean_pos += cloud.position(j);
      if (colored) mean_luma += luma(cloud.color(j));
      ++used;
    }
    if (used == 0) continue;
    const double inv = 1.0 / static_cast<double>(used);
    response[i] = colored ? std::abs(luma(cloud.color(i)) - inv * mean_luma)
                          : norm(cloud.position(i) - inv * mean_pos);
  }
  return response;
}

std::vector<std::size_t> top_responses(std::span<const double> response, std::size_t count) {
  std::vector<std::size_t> order(response.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  count = std::min(count, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (response[a] != response[b]) return response[a] > response[b];
                      return a < b;
                    });
  order.resize(count);
  return order;
}

CenterSet centers_at(const PointCloud& cloud, std::span<const std::size_t> indices, CenterProvenance provenance) {
  CenterSet c;
  c.provenance = provenance;
  c.source_indices.assign(indices.begin(), indices.end());
  c.positions.reserve(indices.size());
  for (auto i : indices) c.positions.push_back(cloud.position(i));
  if (cloud.has_colors()) {
    std::vector<Vec3> colors;
    colors.reserve(indices.size());
    for (auto i : indices) colors.push_back(cloud.color(i));
    c.colors = std::move(colors);
  }
  return c;
}

}  // namespace detail

std::size_t center_count_for(std::size_t n, double center_ratio) {
  const double raw = std::floor(static_cast<double>(n) * center_ratio + 0.5);
  const auto l = raw < 1.0 ? std::size_t{1} : static_cast<std::size_t>(raw);
  return std::min(l, n);
}

std::vector<double> high_frequency_response(const PointCloud& cloud, const MetricConfig& config) {
  const int k = config.hf_filter_length + 1;
  const auto nbrs = knn_search(cloud.positions(), cloud, k, config.p);
  return detail::hf_response_from(cloud, nbrs, static_cast<std::size_t>(config.hf_filter_length));
}

CenterSet select_hf_centers(const PointCloud& cloud, const MetricConfig& config) {
  config.validate();
  const auto response = high_frequency_response(cloud, config);
  const auto picked = detail::top_responses(response, center_count_for(cloud.size(), config.center_ratio));
  return detail::centers_at(cloud, picked, CenterProvenance::high_frequency);
}

CenterSet union_centers(const PointCloud& source, const PointCloud& target) {
  CenterSet c;
  c.provenance = CenterProvenance::union_of_clouds;
  c.positions.assign(source.positions().begin(), source.positions().end());
  c.positions.insert(c.positions.end(), target.positions().begin(), target.positions().end());
  return c;
}

ScaleResult ped_scale(const PointCloud& source, const PointCloud& target, const CenterSet& centers, int scale,
                      const MetricConfig& config) {
  config.validate();
  check_scale(scale);
  if (centers.size() == 0) throw ArgumentError("center set must not be empty");
  detail::check_color_consistency(source, target, centers, config);
  const KdTree src_tree(source.positions(), config.p);
  const KdTree tgt_tree(target.positions(), config.p);
  const auto in_src = src_tree.search(centers.positions, static_cast<std::size_t>(scale));
  const auto in_tgt = tgt_tree.search(centers.positions, static_cast<std::size_t>(scale));
  return detail::scale_from_neighborhoods(source, target, centers, in_src, in_tgt, scale, config);
}

namespace {

struct PreparedInputs {
  PointCloud source;
  PointCloud target;
  CenterSet centers;
};

template <typename SelfKnn>
PreparedInputs prepare(const PointCloud& source, const PointCloud& target, const MetricConfig& config,
                       SelfKnn&& self_knn) {
  if (config.variant == Variant::machine) {
    PointCloud s = source.without_colors();
    PointCloud t = target.without_colors();
    CenterSet c = union_centers(s, t);
    return {std::move(s), std::move(t), std::move(c)};
  }
  if (source.has_colors() != target.has_colors()) {
    throw PreconditionError("human variant needs both clouds colored or both uncolored");
  }
  // Centers are ranked on the original colors, then sampled from the
  // converted source so that their colors live in the metric's space.
  const auto nbrs = self_knn(source, config.hf_filter_length + 1);
  const auto response = detail::hf_response_from(source, nbrs, static_cast<std::size_t>(config.hf_filter_length));
  const auto picked = detail::top_responses(response, center_count_for(source.size(), config.center_ratio));
  if (source.has_colors() && config.color_space == ColorSpace::yuv) {
    PointCloud s = rgb_to_yuv(source);
    PointCloud t = rgb_to_yuv(target);
    CenterSet c = detail::centers_at(s, picked, CenterProvenance::high_frequency);
    return {std::move(s), std::move(t), std::move(c)};
  }
  return {source, target, detail::centers_at(source, picked, CenterProvenance::high_frequency)};
}

EnergyReport make_report(const MetricConfig& config, std::size_t center_count, std::vector<ScaleResult> results) {
  EnergyReport rep;
  rep.variant = config.variant;
  rep.scales = config.scales;
  rep.center_count = center_count;
  if (config.variant == Variant::human) rep.intrinsic_resolution.emplace();
  for (const auto& r : results) {
    rep.per_scale.push_back(r.value);
    if (rep.intrinsic_resolution) rep.intrinsic_resolution->push_back(r.intrinsic_resolution.value_or(0.0));
  }
  rep.pooled = detail::pool_scales(rep.per_scale);
  return rep;
}

}  // namespace

EnergyReport mped(const PointCloud& source, const PointCloud& target, const MetricConfig& config) {
  config.validate();
  if (config.variant == Variant::machine) {
    // Shares the evaluation path with the gradient engine so the two agree
    // bit for bit.
    const auto s = source.without_colors();
    const auto t = target.without_colors();
    auto eval = detail::evaluate_machine(s, t, config, LossDirection::both, false);
    EnergyReport rep;
    rep.variant = Variant::machine;
    rep.scales = config.scales;
    rep.center_count = s.size() + t.size();
    rep.per_scale = std::move(eval.per_scale);
    rep.pooled = eval.pooled;
    return rep;
  }
  auto in = prepare(source, target, config, [&](const PointCloud& c, int k) {
    return knn_search(c.positions(), c, k, config.p);
  });
  detail::check_color_consistency(in.source, in.target, in.centers, config);
  const KdTree src_tree(in.source.positions(), config.p);
  const KdTree tgt_tree(in.target.positions(), config.p);
  const auto kmax = static_cast<std::size_t>(config.scales.front());
  const auto in_src = src_tree.search(in.centers.positions, kmax);
  const auto in_tgt = tgt_tree.search(in.centers.positions, kmax);
  std::vector<ScaleResult> results;
  for (int k : config.scales) {
    results.push_back(detail::scale_from_neighborhoods(in.source, in.target, in.centers, in_src, in_tgt, k, config));
  }
  return make_report(config, in.centers.size(), std::move(results));
}

namespace reference {

ScaleResult ped_scale(const PointCloud& source, const PointCloud& target, const CenterSet& centers, int scale,
                      const MetricConfig& config) {
  config.validate();
  check_scale(scale);
  if (centers.size() == 0) throw ArgumentError("center set must not be empty");
  detail::check_color_consistency(source, target, centers, config);
  const auto in_src = reference::knn_search(centers.positions, source, scale, config.p);
  const auto in_tgt = reference::knn_search(centers.positions, target, scale, config.p);
  return detail::scale_from_neighborhoods_serial(source, target, centers, in_src, in_tgt, scale, config);
}

EnergyReport mped(const PointCloud& source, const PointCloud& target, const MetricConfig& config) {
  config.validate();
  auto in = prepare(source, target, config, [&](const PointCloud& c, int k) {
    return reference::knn_search(c.positions(), c, k, config.p);
  });
  std::vector<ScaleResult> results;
  for (int k : config.scales) results.push_back(reference::ped_scale(in.source, in.target, in.centers, k, config));
  return make_report(config, in.centers.size(), std::move(results));
}

}  // namespace reference

}  // namespace mped
