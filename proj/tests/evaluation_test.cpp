#include <doctest.h>

#include <cmath>

#include "mped/baselines.hpp"
#include "mped/distortion.hpp"
#include "mped/energy.hpp"
#include "mped/error.hpp"
#include "mped/probes.hpp"
#include "mped/report_json.hpp"
#include "mped/sweep.hpp"

using namespace mped;

TEST_CASE("level ladder") {
  CHECK(distortion_parameter(DistortionKind::geometry_gaussian, 1, 10.0) == doctest::Approx(0.04));
  CHECK(distortion_parameter(DistortionKind::geometry_gaussian, 3, 10.0) == doctest::Approx(0.16));
  CHECK(distortion_parameter(DistortionKind::color_gaussian, 5, 1.0) == 64.0);
  CHECK(distortion_parameter(DistortionKind::downsample, 2, 1.0) == doctest::Approx(0.7));
  CHECK(distortion_parameter(DistortionKind::octree_quantize, 2, 10.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(distortion_parameter(DistortionKind::downsample, -1, 1.0), ArgumentError);
}

TEST_CASE("distortions are deterministic and leave level 0 alone") {
  const auto cloud = synthetic_colored_cloud(0, 2000, 1);
  CHECK(bounding_box_diagonal(cloud) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(0.01));
  for (auto kind : {DistortionKind::geometry_gaussian, DistortionKind::color_gaussian, DistortionKind::downsample,
                    DistortionKind::octree_quantize, DistortionKind::combined}) {
    CAPTURE(to_string(kind));
    CHECK(apply_distortion(cloud, {kind, 0, 5, std::nullopt}) == cloud);
    const auto a = apply_distortion(cloud, {kind, 2, 5, std::nullopt});
    const auto b = apply_distortion(cloud, {kind, 2, 5, std::nullopt});
    CHECK(a == b);
    CHECK_FALSE(a == cloud);
    CHECK(parse_distortion_kind(to_string(kind)) == kind);
  }
}

TEST_CASE("each distortion touches what it should") {
  const auto cloud = synthetic_colored_cloud(1, 1000, 2);
  const auto geo = apply_distortion(cloud, {DistortionKind::geometry_gaussian, 1, 0, std::nullopt});
  CHECK(std::vector<Vec3>(geo.colors().begin(), geo.colors().end()) ==
        std::vector<Vec3>(cloud.colors().begin(), cloud.colors().end()));
  const auto col = apply_distortion(cloud, {DistortionKind::color_gaussian, 1, 0, std::nullopt});
  CHECK(std::vector<Vec3>(col.positions().begin(), col.positions().end()) ==
        std::vector<Vec3>(cloud.positions().begin(), cloud.positions().end()));
  for (const auto& c : col.colors())
    for (double v : c) CHECK((v >= 0.0 && v <= 255.0));

  const auto down = apply_distortion(cloud, {DistortionKind::downsample, 2, 0, std::nullopt});
  CHECK(down.size() == 700);
  const auto down_more = apply_distortion(cloud, {DistortionKind::downsample, 4, 0, std::nullopt});
  CHECK(down_more.size() == 400);

  const auto quant = apply_distortion(cloud, {DistortionKind::octree_quantize, 3, 0, std::nullopt});
  CHECK(quant.size() < cloud.size());
  CHECK(quant.has_colors());

  CHECK_THROWS_AS(apply_distortion(cloud.without_colors(), {DistortionKind::color_gaussian, 1, 0, std::nullopt}),
                  PreconditionError);
  CHECK_THROWS_AS(apply_distortion(cloud, {DistortionKind::downsample, 7, 0, std::nullopt}), ArgumentError);
  CHECK(apply_distortion(cloud, {DistortionKind::downsample, 1, 0, 0.5}).size() == 500);
}

TEST_CASE("octree quantization of a hand cloud") {
  const PointCloud c({{0, 0, 0}, {0.4, 0.1, 0}, {1.2, 0, 0}}, {{0, 0, 0}, {10, 20, 30}, {5, 5, 5}});
  const auto q = apply_distortion(c, {DistortionKind::octree_quantize, 1, 0, 1.0});
  REQUIRE(q.size() == 2);
  CHECK(q.position(0) == Vec3{0.5, 0.5, 0.5});
  CHECK(q.color(0) == Vec3{5, 10, 15});
  CHECK(q.position(1) == Vec3{1.5, 0.5, 0.5});
}

TEST_CASE("synthetic clouds") {
  for (int shape = 0; shape < 3; ++shape) {
    const auto c = synthetic_colored_cloud(shape, 500, 3);
    CHECK(c.size() == 500);
    CHECK(c.has_colors());
    CHECK(c == synthetic_colored_cloud(shape, 500, 3));
  }
  CHECK_THROWS_AS(synthetic_colored_cloud(3, 10, 0), ArgumentError);
}

TEST_CASE("sweep reports and csv") {
  const auto cloud = synthetic_colored_cloud(0, 1500, 4);
  SweepOptions opt;
  opt.kind = DistortionKind::color_gaussian;
  opt.metric = MetricId::cd;
  opt.human_config = human_preset();
  opt.machine_config = machine_preset();
  const auto cd = monotonicity_sweep(cloud, opt);
  REQUIRE(cd.values.size() == 5);
  for (double v : cd.values) CHECK(v == 0.0);
  CHECK(std::isnan(cd.srocc));

  opt.kind = DistortionKind::geometry_gaussian;
  const auto geo = monotonicity_sweep(cloud, opt);
  CHECK(geo.strictly_increasing);
  CHECK(geo.srocc == 1.0);

  opt.metric = MetricId::psnr_p2po;
  CHECK(monotonicity_sweep(cloud, opt).strictly_decreasing);

  const auto p2po = monotonicity_sweep(cloud, opt);
  const auto csv = sweep_csv({geo, p2po, cd}, "manifest.json");
  CHECK(csv.rfind("# manifest: manifest.json\nkind,level,cd,psnr_p2po\n", 0) == 0);
  CHECK(csv.find("geometry_gaussian,5,") != std::string::npos);
  CHECK(csv.find("color_gaussian,3,0,\n") != std::string::npos);

  opt.levels = 2;
  CHECK_THROWS_AS(monotonicity_sweep(cloud, opt), ArgumentError);
  CHECK(parse_metric_id("mped_machine") == MetricId::mped_machine);
  CHECK_THROWS_AS(parse_metric_id("ssim"), ArgumentError);

  const auto j = to_json(geo);
  CHECK(j["values"].size() == 5);
}

TEST_CASE("isometric probes separate every pair") {
  for (auto c : kAllProbeCases) {
    CAPTURE(to_string(c));
    const auto r = isometric_sensitivity_probe(c);
    CHECK(r.cd[0] == r.cd[1]);
    CHECK(r.emd[0] == r.emd[1]);
    CHECK(differs_relative(r.ped[0], r.ped[1], 1e-6));
    CHECK(r.separated);
    const bool colored = c == ProbeCase::d1d2 || c == ProbeCase::d5d6;
    CHECK(r.psnr_yuv.has_value() == colored);
    if (colored) {
      CHECK(r.cd[0] == 0.0);
      CHECK((*r.psnr_yuv)[0] == (*r.psnr_yuv)[1]);
    } else {
      CHECK(r.cd[0] > 0.0);
    }
    CHECK(to_json(r)["separated"] == true);
  }
  CHECK(parse_probe_case("d6") == ProbeCase::d5d6);
  CHECK_THROWS_AS(parse_probe_case("d9"), ArgumentError);
}

TEST_CASE("differs_relative") {
  CHECK_FALSE(differs_relative(1.0, 1.0, 1e-6));
  CHECK(differs_relative(1.0, 1.1, 1e-6));
  CHECK_FALSE(differs_relative(1.0, 1.0 + 1e-9, 1e-6));
}
