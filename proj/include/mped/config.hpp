#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace mped {

enum class Variant { human, machine };
enum class ColorSpace { rgb, yuv };

/// Every tunable of the metric.
struct MetricConfig {
  /// Neighborhood sizes, strictly descending, each >= 1.
  std::vector<int> scales{10, 5};
  /// Minkowski exponent; heights are ||.||_p^p.
  int p = 2;
  /// Stabilizer inside the field term.
  double sigma = 1.0;
  /// Per-channel weights of the color difference feeding the mass.
  std::array<double, 3> color_weights{1.0, 2.0, 1.0};
  /// Power applied to the color difference (mass).
  double alpha = 0.5;
  /// Power applied to the geometric stimulus: g(h) * h ~ h^beta_power.
  double beta_power = 0.5;
  Variant variant = Variant::human;
  ColorSpace color_space = ColorSpace::rgb;
  /// Neighbor count of the high-pass center filter.
  int hf_filter_length = 4;
  /// L = round(N * center_ratio), at least 1.
  double center_ratio = 1e-4;
  /// Force g == 1 at every scale.
  bool unit_field = false;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;

  bool operator==(const MetricConfig&) const = default;
};

/// Defaults for colored dense clouds judged by people.
MetricConfig human_preset();
/// Defaults for sparse uncolored clouds used as a training loss.
MetricConfig machine_preset();
/// "sjtu-human" or "shapenet-machine"; throws ConfigError otherwise.
MetricConfig preset_by_name(std::string_view name);

/// Color weights conventionally paired with a color space: 1:2:1 for RGB,
/// 6:1:1 for YUV.
std::array<double, 3> default_color_weights(ColorSpace space);

std::string_view to_string(Variant v);
std::string_view to_string(ColorSpace c);
Variant parse_variant(std::string_view s);
ColorSpace parse_color_space(std::string_view s);

}  // namespace mped
