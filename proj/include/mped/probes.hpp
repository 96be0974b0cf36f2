#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "mped/config.hpp"
#include "mped/energy.hpp"
#include "mped/point_cloud.hpp"

namespace mped {

/// Built-in isometric perturbation pairs.
///   d1d2: one color shift applied at two different radii from the center.
///   d3d4: one radial geometric shift applied at two radii.
///   d5d6: two neighborhoods; color shift in the first is shared, the second
///         neighborhood is shifted at two different radii.
///   d7d8: the geometric counterpart of d5d6.
enum class ProbeCase { d1d2, d3d4, d5d6, d7d8 };

/// Accepts "d1d2", "d1", "d2", ... Throws ArgumentError on unknown ids.
ProbeCase parse_probe_case(std::string_view id);
std::string_view to_string(ProbeCase c);
inline constexpr std::array<ProbeCase, 4> kAllProbeCases{ProbeCase::d1d2, ProbeCase::d3d4,
                                                         ProbeCase::d5d6, ProbeCase::d7d8};

struct ProbeFixture {
  PointCloud reference;
  PointCloud first;
  PointCloud second;
  CenterSet centers;
  /// Neighborhood size that covers a whole cluster.
  int scale = 0;
  MetricConfig config;
};

ProbeFixture probe_fixture(ProbeCase c);

struct ProbeReport {
  ProbeCase probe = ProbeCase::d1d2;
  std::array<double, 2> cd{};
  std::array<double, 2> emd{};
  std::array<double, 2> ped{};
  /// Absent when the case is uncolored.
  std::optional<std::array<double, 2>> psnr_yuv;
  /// CD equal across the pair and PED differing by >= 1e-6 relative.
  bool separated = false;
};

ProbeReport isometric_sensitivity_probe(ProbeCase c);

/// Two four-point reconstructions of a four-point reference whose matched
/// squared distances are (2,2,2,2) and (1,1,1,5): same Chamfer distance,
/// different local geometry.
struct ChamferToyFixture {
  PointCloud reference;
  PointCloud first;
  PointCloud second;
};

ChamferToyFixture chamfer_toy_fixture();

/// True when |a - b| >= rel * max(|a|, |b|) and a != b.
bool differs_relative(double a, double b, double rel);

}  // namespace mped
