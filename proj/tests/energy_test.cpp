#include <doctest.h>

#include <cmath>
#include <random>

#include "mped/baselines.hpp"
#include "mped/color.hpp"
#include "mped/energy.hpp"
#include "mped/error.hpp"
#include "mped/knn.hpp"
#include "mped/parallel.hpp"
#include "mped/probes.hpp"
#include "mped/report_json.hpp"
#include "support/oracles.hpp"

using namespace mped;

namespace {

std::vector<testing::OracleCenter> oracle_centers(const CenterSet& c) {
  std::vector<testing::OracleCenter> out;
  for (std::size_t l = 0; l < c.size(); ++l) out.push_back({c.positions[l], c.at(l).color});
  return out;
}

MetricConfig cd_config() {
  MetricConfig c = machine_preset();
  c.scales = {1};
  return c;
}

}  // namespace

TEST_CASE("single neighborhood energies") {
  MetricConfig machine = machine_preset();
  const PointCloud one({{1, 0, 0}});
  const std::vector<std::uint32_t> ids{0};
  const std::vector<double> h{1.0};
  const double e = neighborhood_energy({{0, 0, 0}, std::nullopt}, ids, h, one, 5, machine);
  CHECK(e == doctest::Approx(1.0 / std::sqrt(1.0 + 1e-10)).epsilon(1e-15));

  const std::vector<double> zero{0.0};
  CHECK(neighborhood_energy({{1, 0, 0}, std::nullopt}, ids, zero, one, 5, machine) == 0.0);

  MetricConfig human = human_preset();
  const PointCloud colored({{1, 0, 0}}, {{110, 120, 110}});
  const CenterPoint c{{0, 0, 0}, Vec3{100, 100, 100}};
  CHECK(point_mass(c.color, &colored.color(0), human) == doctest::Approx(std::sqrt(61.0)).epsilon(1e-15));
  CHECK(neighborhood_energy(c, ids, h, colored, 5, human) ==
        doctest::Approx(std::sqrt(61.0) / std::sqrt(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(neighborhood_energy({{0, 0, 0}, std::nullopt}, ids, h, colored, 5, human), PreconditionError);
}

TEST_CASE("field strength branches") {
  MetricConfig c = machine_preset();
  CHECK(field_strength(4.0, 1, c) == 1.0);
  CHECK(field_strength(4.0, 3, c) == doctest::Approx(1.0 / std::sqrt(4.0 + 1e-10)));
  c.unit_field = true;
  CHECK(field_strength(4.0, 3, c) == 1.0);
  c.unit_field = false;
  c.beta_power = 0.25;
  CHECK(field_strength(4.0, 3, c) == doctest::Approx(std::pow(4.0 + 1e-10, -0.75)).epsilon(1e-15));
}

TEST_CASE("single-scale PED matches the textbook oracle") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const bool colored = trial % 2 == 0;
    const bool human = trial % 4 < 2;
    MetricConfig cfg = human ? human_preset() : machine_preset();
    cfg.p = trial % 3 == 0 ? 1 : 2;
    if (trial % 5 == 0) cfg.beta_power = 0.3;
    if (trial % 7 == 0) cfg.alpha = 0.8;
    const auto x = testing::random_cloud(rng, 60 + trial, colored);
    const auto y = testing::random_cloud(rng, 40 + 2 * trial, colored);
    const auto centers_src = testing::random_cloud(rng, 12, colored);
    CenterSet centers = CenterSet::from_points(
        {centers_src.positions().begin(), centers_src.positions().end()},
        human && colored ? std::optional(std::vector<Vec3>(centers_src.colors().begin(), centers_src.colors().end()))
                         : std::nullopt);
    const PointCloud xs = human ? x : x.without_colors();
    const PointCloud ys = human ? y : y.without_colors();
    for (int k : {1, 4, 9, 200}) {
      CAPTURE(trial);
      CAPTURE(k);
      const double lib = ped_scale(xs, ys, centers, k, cfg).value;
      const double ref = reference::ped_scale(xs, ys, centers, k, cfg).value;
      const double oracle = testing::oracle_ped(xs, ys, oracle_centers(centers), k, cfg);
      CHECK(lib == ref);
      CHECK(lib == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("human MPED matches the oracle on the selected centers, rgb and yuv") {
  std::mt19937_64 rng(8);
  for (auto space : {ColorSpace::rgb, ColorSpace::yuv}) {
    MetricConfig cfg = human_preset();
    cfg.color_space = space;
    cfg.color_weights = default_color_weights(space);
    cfg.center_ratio = 0.05;
    const auto x = testing::random_cloud(rng, 400, true);
    const auto y = testing::random_cloud(rng, 350, true);
    const auto rep = mped::mped(x, y, cfg);
    const auto centers = select_hf_centers(x, cfg);
    CHECK(rep.center_count == centers.size());
    CHECK(centers.size() == 20);

    const PointCloud xs = space == ColorSpace::yuv ? rgb_to_yuv(x) : x;
    const PointCloud ys = space == ColorSpace::yuv ? rgb_to_yuv(y) : y;
    std::vector<testing::OracleCenter> oc;
    for (auto i : centers.source_indices) oc.push_back({xs.position(i), xs.color(i)});
    for (std::size_t s = 0; s < cfg.scales.size(); ++s) {
      CHECK(rep.per_scale[s] == doctest::Approx(testing::oracle_ped(xs, ys, oc, cfg.scales[s], cfg)).epsilon(1e-12));
    }
    CHECK(rep.pooled == (rep.per_scale[0] + rep.per_scale[1]) / 2.0);
    CHECK(rep.intrinsic_resolution.has_value());
  }
}

TEST_CASE("parallel and serial reference agree bit for bit") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const bool human = trial % 2 == 0;
    MetricConfig cfg = human ? human_preset() : machine_preset();
    cfg.center_ratio = 0.02;
    const auto x = testing::random_cloud(rng, 700, human);
    const auto y = testing::random_cloud(rng, 650, human);
    const auto a = mped::mped(x, y, cfg);
    const auto b = reference::mped(x, y, cfg);
    CHECK(a.per_scale == b.per_scale);
    CHECK(a.pooled == b.pooled);
    CHECK(a.center_count == b.center_count);
  }
}

TEST_CASE("thread count does not change the result") {
  std::mt19937_64 rng(23);
  const auto x = testing::random_cloud(rng, 4000, true);
  const auto y = testing::random_cloud(rng, 3900, true);
  MetricConfig human = human_preset();
  human.center_ratio = 0.01;
  const int before = parallel::max_threads();
  parallel::set_max_threads(1);
  const auto h1 = mped::mped(x, y, human);
  const auto m1 = mped::mped(x, y, machine_preset());
  parallel::set_max_threads(3);
  const auto h3 = mped::mped(x, y, human);
  const auto m3 = mped::mped(x, y, machine_preset());
  parallel::set_max_threads(before);
  CHECK(h1.per_scale == h3.per_scale);
  CHECK(m1.per_scale == m3.per_scale);
}

TEST_CASE("identity gives zero") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = testing::random_cloud(rng, 20 + 97 * trial, trial % 2 == 0);
    for (auto cfg : {human_preset(), machine_preset()}) {
      const auto r = mped::mped(x, x, cfg);
      CHECK(r.pooled == 0.0);
      for (double v : r.per_scale) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("CD is the K=1 special case") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 500);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = testing::random_cloud(rng, size(rng), false);
    const auto y = testing::random_cloud(rng, size(rng), false);
    const double cd = chamfer_distance(x, y);
    CHECK(cd == doctest::Approx(testing::oracle_chamfer(x, y)).epsilon(1e-12));
    const double ped = ped_scale(x, y, union_centers(x, y), 1, cd_config()).value;
    CHECK(std::abs(ped - cd) <= 1e-9 * cd);
    CHECK(mped::mped(x, y, cd_config()).pooled == ped);
  }
}

TEST_CASE("Fig. 3 toy: equal CD, different PED at K=3") {
  const auto toy = chamfer_toy_fixture();
  CHECK(chamfer_distance(toy.reference, toy.first) == 16.0);
  CHECK(chamfer_distance(toy.reference, toy.second) == 16.0);
  const auto c1 = union_centers(toy.reference, toy.first);
  const auto c2 = union_centers(toy.reference, toy.second);
  CHECK(ped_scale(toy.reference, toy.first, c1, 1, cd_config()).value == 16.0);
  CHECK(ped_scale(toy.reference, toy.second, c2, 1, cd_config()).value == 16.0);

  MetricConfig k3 = machine_preset();
  k3.scales = {3};
  const double a = ped_scale(toy.reference, toy.first, c1, 3, k3).value;
  const double b = ped_scale(toy.reference, toy.second, c2, 3, k3).value;
  CHECK(differs_relative(a, b, 1e-6));
  CHECK(a == doctest::Approx(testing::oracle_ped(toy.reference, toy.first, oracle_centers(c1), 3, k3)).epsilon(1e-12));
  CHECK(b == doctest::Approx(testing::oracle_ped(toy.reference, toy.second, oracle_centers(c2), 3, k3)).epsilon(1e-12));
}

TEST_CASE("machine PED is symmetric and non-negative") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = testing::random_cloud(rng, 80, false);
    const auto y = testing::random_cloud(rng, 120, false);
    const auto xy = mped::mped(x, y, machine_preset());
    const auto yx = mped::mped(y, x, machine_preset());
    for (std::size_t s = 0; s < xy.per_scale.size(); ++s) {
      CHECK(xy.per_scale[s] >= 0.0);
      CHECK(xy.per_scale[s] == doctest::Approx(yx.per_scale[s]).epsilon(1e-13));
    }
  }
}

TEST_CASE("field is monotone and equal displacements cost less energy farther out") {
  for (auto cfg : {human_preset(), machine_preset()}) {
    for (double beta : {0.5, 0.3, 0.9}) {
      cfg.beta_power = beta;
      std::vector<double> hs;
      for (int i = 0; i <= 400; ++i) hs.push_back(0.01 * std::pow(10.0, 4.0 * i / 400.0));
      auto e = [&](double h) { return field_strength(h, 10, cfg) * h; };
      for (std::size_t i = 1; i < hs.size(); ++i) {
        CHECK(field_strength(hs[i - 1], 10, cfg) >= field_strength(hs[i], 10, cfg));
        for (double delta : {0.1, 0.5, 1.0}) {
          CHECK(e(hs[i - 1] + delta) - e(hs[i - 1]) >= e(hs[i] + delta) - e(hs[i]));
        }
      }
    }
  }
}

TEST_CASE("center count and selection") {
  CHECK(center_count_for(500000, 1e-4) == 50);
  CHECK(center_count_for(5000, 1e-4) == 1);
  CHECK(center_count_for(15000, 1e-4) == 2);
  CHECK(center_count_for(14999, 1e-4) == 1);
  CHECK(center_count_for(3, 10.0) == 3);

  std::vector<Vec3> grid;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) grid.push_back({double(i), double(j), 0.0});
  std::vector<Vec3> flat(grid.size(), Vec3{50, 50, 50});
  MetricConfig cfg = human_preset();
  cfg.center_ratio = 0.03;
  const auto constant = select_hf_centers(PointCloud(grid, flat), cfg);
  CHECK(constant.source_indices == std::vector<std::size_t>{0, 1, 2});
  for (double r : high_frequency_response(PointCloud(grid, flat), cfg)) CHECK(r == 0.0);

  auto spot = flat;
  spot[57] = {250, 10, 10};
  cfg.center_ratio = 0.01;
  const auto one = select_hf_centers(PointCloud(grid, spot), cfg);
  CHECK(one.source_indices == std::vector<std::size_t>{57});
  CHECK(one.colors.has_value());
  CHECK(one.provenance == CenterProvenance::high_frequency);

  // Uncolored: the geometric outlier wins.
  auto bumped = grid;
  bumped[33][2] = 4.0;
  CHECK(select_hf_centers(PointCloud(bumped), cfg).source_indices == std::vector<std::size_t>{33});
}

TEST_CASE("a single color change near a center is detected") {
  std::mt19937_64 rng(4);
  const auto x = testing::random_cloud(rng, 2000, true);
  const MetricConfig cfg = human_preset();
  const auto centers = select_hf_centers(x, cfg);
  REQUIRE(centers.size() == 1);
  const std::vector<Vec3> q{centers.positions[0]};
  const auto nb = knn_search(q, x, 2, 2);
  const std::size_t victim = nb.neighbors(0)[1];
  std::vector<Vec3> cols(x.colors().begin(), x.colors().end());
  cols[victim][0] += 20;
  const auto y = x.with_colors(cols);
  CHECK(mped::mped(x, y, cfg).pooled > 0.0);
}

TEST_CASE("errors") {
  const PointCloud colored({{0, 0, 0}, {1, 0, 0}}, {{1, 1, 1}, {2, 2, 2}});
  const PointCloud plain({{0, 0, 0}, {1, 0, 0}});
  CHECK_THROWS_AS(mped::mped(colored, plain, human_preset()), PreconditionError);
  CHECK_NOTHROW(mped::mped(colored, plain, machine_preset()));
  const auto c = union_centers(plain, plain);
  CHECK_THROWS_AS(ped_scale(plain, plain, c, 0, machine_preset()), ArgumentError);
  MetricConfig bad = machine_preset();
  bad.scales = {1, 5};
  CHECK_THROWS_AS(mped::mped(plain, plain, bad), ConfigError);
  bad = machine_preset();
  bad.sigma = 0.0;
  CHECK_THROWS_AS(mped::mped(plain, plain, bad), ConfigError);
  CHECK_THROWS_AS(CenterSet::from_points({}), ArgumentError);
}

TEST_CASE("degenerate source neighborhoods skip the resolution factor") {
  const PointCloud x({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const PointCloud y({{1, 1, 1}, {1, 1, 2}, {1, 1, 1}});
  MetricConfig cfg = human_preset();
  cfg.scales = {3};
  const auto r = ped_scale(x, y, CenterSet::from_points({{1, 1, 1}}), 3, cfg);
  REQUIRE(r.intrinsic_resolution.has_value());
  CHECK(*r.intrinsic_resolution == 0.0);
  CHECK(r.value == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("report json shape") {
  std::mt19937_64 rng(9);
  const auto x = testing::random_cloud(rng, 50, true);
  const auto j = to_json(mped::mped(x, x, human_preset()));
  CHECK(j["variant"] == "human");
  CHECK(j["psi"] == nlohmann::json::array({10, 5}));
  CHECK(j["per_scale"].contains("10"));
  CHECK(j["L"] == 1);
  CHECK(j["ir"].is_object());
  CHECK(to_json(mped::mped(x, x, machine_preset()))["ir"].is_null());
}
