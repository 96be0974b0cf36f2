#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "mped/cloud_io.hpp"
#include "mped/color.hpp"
#include "mped/error.hpp"
#include "mped/point_cloud.hpp"
#include "mped/summation.hpp"
#include "support/oracles.hpp"

using namespace mped;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "mped_point_cloud_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("cloud construction validates its input") {
  CHECK_THROWS_AS(PointCloud(std::vector<Vec3>{}), ArgumentError);
  CHECK_THROWS_AS(PointCloud({{0, 0, std::nan("")}}), ArgumentError);
  CHECK_THROWS_AS(PointCloud({{0, 0, 0}}, {{1, 2, 3}, {4, 5, 6}}), ArgumentError);
  CHECK_THROWS_AS(PointCloud({{0, 0, 0}}, {{1, 2, std::numeric_limits<double>::infinity()}}), ArgumentError);

  const PointCloud c({{1, 2, 3}, {4, 5, 6}}, {{10, 20, 30}, {40, 50, 60}});
  CHECK(c.size() == 2);
  CHECK(c.has_colors());
  CHECK(c.color(1)[2] == 60);
  CHECK_FALSE(c.without_colors().has_colors());
}

TEST_CASE("normalize_unit_sphere") {
  const auto two = normalize_unit_sphere(PointCloud({{0, 0, 0}, {2, 0, 0}}));
  CHECK(two.position(0) == Vec3{-1, 0, 0});
  CHECK(two.position(1) == Vec3{1, 0, 0});

  CHECK(normalize_unit_sphere(PointCloud({{5, 5, 5}})).position(0) == Vec3{0, 0, 0});

  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto c = normalize_unit_sphere(testing::random_cloud(rng, 100, true, 30.0));
    double max_norm = 0.0;
    Vec3 centroid{0, 0, 0};
    for (const auto& p : c.positions()) {
      max_norm = std::max(max_norm, norm(p));
      centroid += p;
    }
    CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(centroid) < 1e-12);
    CHECK(c.has_colors());
  }
}

TEST_CASE("concatenate keeps colors only when both sides have them") {
  const PointCloud a({{0, 0, 0}}, {{1, 1, 1}});
  const PointCloud b({{1, 0, 0}});
  CHECK_FALSE(concatenate(a, b).has_colors());
  const auto ab = concatenate(a, a);
  CHECK(ab.size() == 2);
  CHECK(ab.has_colors());
}

TEST_CASE("BT.601 full-range conversion") {
  const auto white = rgb_to_yuv(Vec3{255, 255, 255});
  CHECK(white[0] == doctest::Approx(255.0).epsilon(1e-12));
  CHECK(white[1] == doctest::Approx(128.0).epsilon(1e-12));
  CHECK(white[2] == doctest::Approx(128.0).epsilon(1e-12));

  // Hand-evaluated JFIF matrix for pure red.
  const auto red = rgb_to_yuv(Vec3{255, 0, 0});
  CHECK(red[0] == doctest::Approx(76.245).epsilon(1e-12));
  CHECK(red[1] == doctest::Approx(84.97232).epsilon(1e-12));
  CHECK(red[2] == doctest::Approx(255.5).epsilon(1e-12));

  CHECK_THROWS_AS(rgb_to_yuv(PointCloud({{0, 0, 0}})), PreconditionError);
}

TEST_CASE("compensated summation recovers cancelled terms") {
  const std::vector<double> v{1e100, 1.0, -1e100};
  CHECK(compensated_sum(v) == 1.0);
  std::vector<double> many(10000, 0.1);
  CHECK(compensated_sum(many) == doctest::Approx(1000.0).epsilon(1e-15));
}

TEST_CASE("ascii formats round-trip exactly") {
  std::mt19937_64 rng(11);
  const auto colored = testing::random_cloud(rng, 200, true, 1e3);
  const auto plain = testing::random_cloud(rng, 50, false, 1e-3);
  for (auto fmt : {CloudFormat::ply_ascii, CloudFormat::ply_binary_le, CloudFormat::xyz, CloudFormat::csv}) {
    CAPTURE(format_name(fmt));
    const auto path = scratch(std::string("rt.") + std::string(format_name(fmt)));
    for (const auto* cloud : {&colored, &plain}) {
      save_cloud(path, *cloud, fmt, "round trip");
      const auto once = load_cloud(path, fmt);
      CHECK(once == *cloud);
      save_cloud(path, once, fmt);
      CHECK(load_cloud(path, fmt) == *cloud);
    }
  }
}

TEST_CASE("non-byte colors survive as doubles") {
  const PointCloud c({{0, 0, 0}, {1, 1, 1}}, {{0.5, 300, -2}, {1, 2, 3}});
  const auto path = scratch("doubles.ply");
  save_cloud(path, c, CloudFormat::ply_ascii);
  CHECK(load_cloud(path) == c);
}

TEST_CASE("ply reader accepts float32 vertices and r/g/b names") {
  const auto path = scratch("hand.ply");
  write_text(path,
             "ply\nformat ascii 1.0\ncomment hand written\nelement vertex 2\n"
             "property float x\nproperty float y\nproperty float z\nproperty float nx\n"
             "property uchar r\nproperty uchar g\nproperty uchar b\n"
             "element face 0\nproperty list uchar int vertex_indices\nend_header\n"
             "0 0 0 9 1 2 3\n0.5 1 2 9 255 0 7\n");
  const auto c = load_cloud(path);
  REQUIRE(c.size() == 2);
  CHECK(c.has_colors());
  CHECK(c.position(1) == Vec3{0.5, 1, 2});
  CHECK(c.color(1) == Vec3{255, 0, 7});
}

TEST_CASE("binary ply with float32 coordinates") {
  const auto path = scratch("bin32.ply");
  std::string text = "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
                     "property float x\nproperty float y\nproperty float z\nend_header\n";
  const float vals[6] = {1.5f, -2.0f, 0.25f, 3.0f, 4.0f, 5.0f};
  text.append(reinterpret_cast<const char*>(vals), sizeof(vals));
  write_text(path, text);
  const auto c = load_cloud(path);
  CHECK(c.position(0) == Vec3{1.5, -2.0, 0.25});
  CHECK(c.position(1) == Vec3{3, 4, 5});
  CHECK_FALSE(c.has_colors());
}

TEST_CASE("parse errors name the location") {
  auto message_of = [](const fs::path& p) {
    try {
      (void)load_cloud(p);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };

  const auto bad_number = scratch("bad_number.xyz");
  write_text(bad_number, "0 0 0\n1 x 1\n");
  CHECK(message_of(bad_number).find(":2:") != std::string::npos);

  const auto short_ply = scratch("short.ply");
  write_text(short_ply,
             "ply\nformat ascii 1.0\nelement vertex 3\nproperty double x\nproperty double y\n"
             "property double z\nend_header\n0 0 0\n1 1 1\n");
  CHECK(message_of(short_ply).find("truncated") != std::string::npos);

  const auto short_bin = scratch("short_bin.ply");
  write_text(short_bin,
             "ply\nformat binary_little_endian 1.0\nelement vertex 1\nproperty double x\n"
             "property double y\nproperty double z\nend_header\n1234");
  CHECK(message_of(short_bin).find("byte") != std::string::npos);

  const auto big_endian = scratch("be.ply");
  write_text(big_endian, "ply\nformat binary_big_endian 1.0\nelement vertex 0\nend_header\n");
  CHECK(message_of(big_endian).find(":2:") != std::string::npos);

  const auto no_header = scratch("nohdr.csv");
  write_text(no_header, "1,2,3\n");
  CHECK(message_of(no_header) != "no error");

  const auto nan_csv = scratch("nan.csv");
  write_text(nan_csv, "x,y,z\n1,2,nan\n");
  CHECK(message_of(nan_csv).find(":2:") != std::string::npos);

  CHECK_THROWS_AS(load_cloud(scratch("missing.ply")), ParseError);
  CHECK_THROWS_AS(format_from_extension("cloud.obj"), ParseError);
}

TEST_CASE("csv header may order columns freely") {
  const auto path = scratch("cols.csv");
  write_text(path, "# produced elsewhere\nblue,x,green,y,red,z\n3,1,2,10,1,100\n");
  const auto c = load_cloud(path);
  CHECK(c.position(0) == Vec3{1, 10, 100});
  CHECK(c.color(0) == Vec3{1, 2, 3});
}
