#include "mped/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "mped/error.hpp"

namespace mped {

DistortionKind parse_distortion_kind(std::string_view raw) {
  std::string name(raw);
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "geometry_gaussian" || name == "geometry") return DistortionKind::geometry_gaussian;
  if (name == "color_gaussian" || name == "color") return DistortionKind::color_gaussian;
  if (name == "downsample") return DistortionKind::downsample;
  if (name == "octree_quantize" || name == "octree") return DistortionKind::octree_quantize;
  if (name == "combined") return DistortionKind::combined;
  throw ArgumentError("unknown distortion '" + std::string(raw) + "'");
}

std::string_view to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::geometry_gaussian: return "geometry_gaussian";
    case DistortionKind::color_gaussian: return "color_gaussian";
    case DistortionKind::downsample: return "downsample";
    case DistortionKind::octree_quantize: return "octree_quantize";
    case DistortionKind::combined: return "combined";
  }
  return "?";
}

double bounding_box_diagonal(const PointCloud& cloud) {
  Vec3 lo = cloud.position(0);
  Vec3 hi = lo;
  for (const auto& p : cloud.positions()) {
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  return norm(hi - lo);
}

double distortion_parameter(DistortionKind kind, int level, double diagonal) {
  if (level < 0) throw ArgumentError("distortion level must be >= 0");
  const double doubling = std::ldexp(1.0, level - 1);
  switch (kind) {
    case DistortionKind::geometry_gaussian:
    case DistortionKind::combined: return 0.004 * diagonal * doubling;
    case DistortionKind::color_gaussian: return 4.0 * doubling;
    case DistortionKind::downsample: return 1.0 - 0.15 * level;
    case DistortionKind::octree_quantize: return 0.01 * diagonal * doubling;
  }
  return 0.0;
}

namespace {

// Noise streams depend on the seed and kind only, so every level of a
// ladder perturbs the same directions by a growing amount.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

PointCloud geometry_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  auto rng = stream(seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> pos(cloud.positions().begin(), cloud.positions().end());
  for (auto& p : pos) {
    for (auto& v : p) v += sigma * normal(rng);
  }
  return cloud.with_positions(std::move(pos));
}

PointCloud color_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  if (!cloud.has_colors()) throw PreconditionError("color distortion needs a colored cloud");
  auto rng = stream(seed, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> col(cloud.colors().begin(), cloud.colors().end());
  for (auto& c : col) {
    for (auto& v : c) v = std::clamp(v + sigma * normal(rng), 0.0, 255.0);
  }
  return cloud.with_colors(std::move(col));
}

PointCloud downsample(const PointCloud& cloud, double keep, std::uint64_t seed) {
  if (!(keep > 0.0 && keep <= 1.0)) throw ArgumentError("downsample keep ratio must be in (0, 1]");
  const std::size_t n = cloud.size();
  const auto count = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(keep * static_cast<double>(n))),
                                             1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = stream(seed, 3);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(count);
  std::sort(order.begin(), order.end());
  std::vector<Vec3> pos;
  std::vector<Vec3> col;
  for (auto i : order) {
    pos.push_back(cloud.position(i));
    if (cloud.has_colors()) col.push_back(cloud.color(i));
  }
  return cloud.has_colors() ? PointCloud(std::move(pos), std::move(col)) : PointCloud(std::move(pos));
}

PointCloud octree_quantize(const PointCloud& cloud, double step) {
  if (!(step > 0.0)) throw ArgumentError("quantization step must be positive");
  Vec3 lo = cloud.position(0);
  for (const auto& p : cloud.positions()) {
    for (int d = 0; d < 3; ++d) lo[d] = std::min(lo[d], p[d]);
  }
  struct Cell {
    std::size_t first;
    std::size_t count = 0;
    Vec3 color_sum{};
  };
  std::map<std::array<long long, 3>, Cell> cells;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.position(i);
    std::array<long long, 3> key{};
    for (int d = 0; d < 3; ++d) key[d] = static_cast<long long>(std::floor((p[d] - lo[d]) / step));
    auto [it, inserted] = cells.try_emplace(key, Cell{i});
    ++it->second.count;
    if (cloud.has_colors()) it->second.color_sum += cloud.color(i);
  }
  std::vector<std::pair<std::size_t, const std::pair<const std::array<long long, 3>, Cell>*>> ordered;
  for (const auto& kv : cells) ordered.emplace_back(kv.second.first, &kv);
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Vec3> pos;
  std::vector<Vec3> col;
  for (const auto& [first, kv] : ordered) {
    const auto& key = kv->first;
    pos.push_back({lo[0] + (static_cast<double>(key[0]) + 0.5) * step, lo[1] + (static_cast<double>(key[1]) + 0.5) * step,
                   lo[2] + (static_cast<double>(key[2]) + 0.5) * step});
    if (cloud.has_colors()) col.push_back((1.0 / static_cast<double>(kv->second.count)) * kv->second.color_sum);
  }
  return cloud.has_colors() ? PointCloud(std::move(pos), std::move(col)) : PointCloud(std::move(pos));
}

}  // namespace

PointCloud apply_distortion(const PointCloud& cloud, const DistortionSpec& spec) {
  if (spec.level < 0) throw ArgumentError("distortion level must be >= 0");
  if (spec.kind == DistortionKind::color_gaussian || spec.kind == DistortionKind::combined) {
    if (!cloud.has_colors()) throw PreconditionError("color distortion needs a colored cloud");
  }
  if (spec.level == 0 && !spec.parameter) return cloud;
  const double diag = bounding_box_diagonal(cloud);
  const double param = spec.parameter ? *spec.parameter : distortion_parameter(spec.kind, spec.level, diag);
  switch (spec.kind) {
    case DistortionKind::geometry_gaussian: return geometry_noise(cloud, param, spec.seed);
    case DistortionKind::color_gaussian: return color_noise(cloud, param, spec.seed);
    case DistortionKind::downsample: return downsample(cloud, param, spec.seed);
    case DistortionKind::octree_quantize: return octree_quantize(cloud, param);
    case DistortionKind::combined: {
      const double color_sigma = distortion_parameter(DistortionKind::color_gaussian, spec.level, diag);
      return color_noise(geometry_noise(cloud, param, spec.seed), color_sigma, spec.seed);
    }
  }
  return cloud;
}

PointCloud synthetic_colored_cloud(int shape, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("synthetic cloud needs at least one point");
  if (shape < 0 || shape > 2) throw ArgumentError("synthetic shape must be 0, 1 or 2");
  auto rng = stream(seed, 100 + static_cast<std::uint64_t>(shape));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double pi = std::numbers::pi;
  const double golden = pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> pos(n);
  std::vector<Vec3> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    Vec3 p{};
    double u = 0.0;
    double v = 0.0;
    if (shape == 0) {
      const double z = 1.0 - 2.0 * t;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      p = {r * std::cos(phi), r * std::sin(phi), z};
      u = phi;
      v = std::acos(z);
    } else if (shape == 1) {
      u = 2.0 * pi * t * 37.0;
      v = golden * static_cast<double>(i);
      const double ring = 1.0 + 0.35 * std::cos(v);
      p = {ring * std::cos(u), ring * std::sin(u), 0.35 * std::sin(v)};
    } else {
      const int face = static_cast<int>(unit(rng) * 6.0) % 6;
      const double a = 2.0 * unit(rng) - 1.0;
      const double b = 2.0 * unit(rng) - 1.0;
      const double s = face % 2 == 0 ? 1.0 : -1.0;
      if (face < 2) p = {s, a, b};
      if (face >= 2 && face < 4) p = {a, s, b};
      if (face >= 4) p = {a, b, s};
      u = pi * a;
      v = pi * b;
    }
    for (auto& c : p) c += 1e-3 * (unit(rng) - 0.5);
    pos[i] = p;
    const double stripe = std::fmod(std::floor((p[2] + 2.0) * 6.0), 2.0) == 0.0 ? 200.0 : 60.0;
    col[i] = {std::clamp(128.0 + 100.0 * std::sin(3.0 * u), 0.0, 255.0), stripe,
              std::clamp(128.0 + 90.0 * std::cos(2.0 * v + p[0]), 0.0, 255.0)};
  }
  return PointCloud(std::move(pos), std::move(col));
}

}  // namespace mped
