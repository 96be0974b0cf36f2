#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mped {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// A set of N >= 1 points with optional per-point 3-channel colors.
///
/// Immutable once built: the constructors validate that every coordinate is
/// finite and that colors (when given) have exactly one entry per point.
class PointCloud {
 public:
  explicit PointCloud(std::vector<Vec3> positions);
  PointCloud(std::vector<Vec3> positions, std::vector<Vec3> colors);

  std::size_t size() const noexcept { return positions_.size(); }
  bool has_colors() const noexcept { return colors_.has_value(); }

  std::span<const Vec3> positions() const noexcept { return positions_; }
  /// Empty span when the cloud carries no colors.
  std::span<const Vec3> colors() const noexcept {
    return colors_ ? std::span<const Vec3>(*colors_) : std::span<const Vec3>();
  }

  const Vec3& position(std::size_t i) const { return positions_[i]; }
  const Vec3& color(std::size_t i) const { return (*colors_)[i]; }

  PointCloud with_positions(std::vector<Vec3> positions) const;
  PointCloud with_colors(std::vector<Vec3> colors) const;
  PointCloud without_colors() const { return PointCloud(positions_); }

  bool operator==(const PointCloud&) const = default;

 private:
  std::vector<Vec3> positions_;
  std::optional<std::vector<Vec3>> colors_;
};

/// Translate the centroid to the origin and scale so the farthest point has
/// unit Euclidean norm. Clouds whose points all coincide are only centered.
PointCloud normalize_unit_sphere(const PointCloud& cloud);

/// Concatenation of two clouds' positions (colors kept only if both have them).
PointCloud concatenate(const PointCloud& a, const PointCloud& b);

}  // namespace mped
