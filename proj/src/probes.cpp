#include "mped/probes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mped/baselines.hpp"
#include "mped/error.hpp"

namespace mped {

ProbeCase parse_probe_case(std::string_view id) {
  if (id == "d1d2" || id == "d1" || id == "d2") return ProbeCase::d1d2;
  if (id == "d3d4" || id == "d3" || id == "d4") return ProbeCase::d3d4;
  if (id == "d5d6" || id == "d5" || id == "d6") return ProbeCase::d5d6;
  if (id == "d7d8" || id == "d7" || id == "d8") return ProbeCase::d7d8;
  throw ArgumentError("unknown probe '" + std::string(id) + "'");
}

std::string_view to_string(ProbeCase c) {
  switch (c) {
    case ProbeCase::d1d2: return "d1d2";
    case ProbeCase::d3d4: return "d3d4";
    case ProbeCase::d5d6: return "d5d6";
    case ProbeCase::d7d8: return "d7d8";
  }
  return "?";
}

namespace {

// Each cluster is a center plus one point at radius 1 and one at radius 3.
// Offsets and shifts are powers of two so perturbed distances are exact.
constexpr double kNear = 1.0;
constexpr double kFar = 3.0;
constexpr double kStep = 0.25;
constexpr double kClusterGap = 100.0;
const Vec3 kGray{100.0, 100.0, 100.0};
const Vec3 kTinted{120.0, 100.0, 100.0};

std::vector<Vec3> cluster_points(const Vec3& o) {
  return {o, o + Vec3{kNear, 0.0, 0.0}, o + Vec3{0.0, kFar, 0.0}};
}

enum Slot { kCenter = 0, kNearSlot = 1, kFarSlot = 2 };

Vec3 pushed_out(const Vec3& p, const Vec3& origin) {
  const Vec3 d = p - origin;
  const double r = norm(d);
  return p + Vec3{kStep * d[0] / r, kStep * d[1] / r, kStep * d[2] / r};
}

}  // namespace

ProbeFixture probe_fixture(ProbeCase c) {
  const bool two_clusters = c == ProbeCase::d5d6 || c == ProbeCase::d7d8;
  const bool color = c == ProbeCase::d1d2 || c == ProbeCase::d5d6;

  std::vector<Vec3> origins{{0.0, 0.0, 0.0}};
  if (two_clusters) origins.push_back({kClusterGap, 0.0, 0.0});

  std::vector<Vec3> pos;
  for (const auto& o : origins) {
    for (const auto& p : cluster_points(o)) pos.push_back(p);
  }
  std::vector<Vec3> col(pos.size(), kGray);

  // (cluster, slot) perturbed in the first and second cloud respectively.
  struct Edit {
    std::size_t cluster;
    int slot;
  };
  std::vector<Edit> first_edits;
  std::vector<Edit> second_edits;
  if (two_clusters) {
    first_edits = {{0, kNearSlot}, {1, kNearSlot}};
    second_edits = {{0, kNearSlot}, {1, kFarSlot}};
  } else {
    first_edits = {{0, kNearSlot}};
    second_edits = {{0, kFarSlot}};
  }

  auto build = [&](const std::vector<Edit>& edits) {
    auto p = pos;
    auto k = col;
    for (const auto& e : edits) {
      const std::size_t i = e.cluster * 3 + static_cast<std::size_t>(e.slot);
      if (color) {
        k[i] = kTinted;
      } else {
        p[i] = pushed_out(p[i], origins[e.cluster]);
      }
    }
    return color ? PointCloud(std::move(p), std::move(k)) : PointCloud(std::move(p));
  };

  MetricConfig cfg = human_preset();
  cfg.scales = {3};

  std::vector<Vec3> centers;
  std::vector<Vec3> center_colors;
  for (const auto& o : origins) {
    centers.push_back(o);
    center_colors.push_back(kGray);
  }

  ProbeFixture f{
      color ? PointCloud(pos, col) : PointCloud(pos),
      build(first_edits),
      build(second_edits),
      CenterSet::from_points(centers, color ? std::optional(center_colors) : std::nullopt),
      3,
      cfg,
  };
  return f;
}

bool differs_relative(double a, double b, double rel) {
  if (a == b) return false;
  return std::abs(a - b) >= rel * std::max(std::abs(a), std::abs(b));
}

ProbeReport isometric_sensitivity_probe(ProbeCase c) {
  const auto f = probe_fixture(c);
  ProbeReport r;
  r.probe = c;
  const PointCloud* pair[2] = {&f.first, &f.second};
  std::array<double, 2> psnr{};
  for (int i = 0; i < 2; ++i) {
    r.cd[i] = chamfer_distance(f.reference, *pair[i]);
    r.emd[i] = emd_exact(f.reference, *pair[i]);
    r.ped[i] = ped_scale(f.reference, *pair[i], f.centers, f.scale, f.config).value;
    if (f.reference.has_colors()) psnr[i] = psnr_yuv(f.reference, *pair[i]).value;
  }
  if (f.reference.has_colors()) r.psnr_yuv = psnr;
  r.separated = r.cd[0] == r.cd[1] && differs_relative(r.ped[0], r.ped[1], 1e-6);
  return r;
}

ChamferToyFixture chamfer_toy_fixture() {
  std::vector<Vec3> ref;
  std::vector<Vec3> even;
  std::vector<Vec3> uneven;
  for (int j = 0; j < 4; ++j) {
    const double x = 10.0 * j;
    ref.push_back({x, 0.0, 0.0});
    even.push_back({x + 1.0, 1.0, 0.0});
    uneven.push_back(j < 3 ? Vec3{x + 1.0, 0.0, 0.0} : Vec3{x + 1.0, 2.0, 0.0});
  }
  return {PointCloud(ref), PointCloud(even), PointCloud(uneven)};
}

}  // namespace mped
