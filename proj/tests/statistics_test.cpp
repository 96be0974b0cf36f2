#include <doctest.h>

#include <cmath>
#include <random>

#include "mped/error.hpp"
#include "mped/statistics.hpp"
#include "support/oracles.hpp"

using namespace mped;

namespace {
const std::vector<double> kA{1, 2, 3, 4, 5};
const std::vector<double> kB{2, 4, 5, 4, 5};
}  // namespace

TEST_CASE("hand-computed five-point fixture") {
  // r = 6 / sqrt(10 * 6); ranks of B are (1, 2.5, 4.5, 2.5, 4.5), r_s = 7 / sqrt(90).
  CHECK(std::abs(pearson(kA, kB) - 6.0 / std::sqrt(60.0)) < 1e-12);
  CHECK(std::abs(spearman(kA, kB) - 7.0 / std::sqrt(90.0)) < 1e-12);
  CHECK(std::abs(rmse(kA, kB) - std::sqrt(1.8)) < 1e-12);
  CHECK(average_ranks(kB) == std::vector<double>{1, 2.5, 4.5, 2.5, 4.5});

  const auto r = correlations(kA, kB);
  CHECK(std::abs(r.plcc - 6.0 / std::sqrt(60.0)) < 1e-12);
  CHECK(std::abs(r.srocc - 7.0 / std::sqrt(90.0)) < 1e-12);
  CHECK(std::abs(r.rmse - std::sqrt(1.8)) < 1e-12);
  CHECK(r.n_samples == 5);
}

TEST_CASE("second fixture with a negative relation") {
  const std::vector<double> a{0.5, 1.5, 2.0, 3.5, 10.0};
  const std::vector<double> b{9.0, 7.0, 7.5, 3.0, 1.0};
  CHECK(std::abs(pearson(a, b) - testing::oracle_pearson(a, b)) < 1e-12);
  // Ranks a = 1..5, b = (5, 3, 4, 2, 1): d^2 sum = 16+1+1+4+16 = 38 -> 1 - 6*38/120.
  CHECK(std::abs(spearman(a, b) - (1.0 - 6.0 * 38.0 / 120.0)) < 1e-12);
}

TEST_CASE("constant input yields NaN correlations") {
  const std::vector<double> flat(5, 3.0);
  const auto r = correlations(flat, kB);
  CHECK(std::isnan(r.plcc));
  CHECK(std::isnan(r.srocc));
  CHECK_THROWS_AS(correlations(std::vector<double>{1}, std::vector<double>{1}), ArgumentError);
  CHECK_THROWS_AS(correlations(kA, std::vector<double>{1, 2}), ArgumentError);
}

TEST_CASE("logistic fit recovers known parameters") {
  const std::vector<LogisticParams> truths{
      {2.0, 1.5, 0.3, 0.1, 5.0},
      {-4.0, 0.8, 10.0, 0.0, 2.0},
      {30.0, 0.05, 50.0, -0.02, 40.0},
  };
  for (const auto& truth : truths) {
    const double lo = truth[2] - 4.0 / truth[1];
    const double hi = truth[2] + 4.0 / truth[1];
    std::vector<double> xs;
    for (int i = 0; i <= 40; ++i) xs.push_back(lo + (hi - lo) * i / 40.0);
    const auto ys = logistic_predict(truth, xs);
    const auto fit = fit_logistic(xs, ys);
    const auto back = logistic_predict(fit.params, xs);
    CHECK(rmse(back, ys) < 1e-6);
  }
}

TEST_CASE("logistic mapping never loses linear correlation") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> obj;
    std::vector<double> mos;
    for (int i = 0; i < 30; ++i) {
      const double x = i * 0.1;
      obj.push_back(x);
      mos.push_back(5.0 / (1.0 + std::exp(2.0 * (x - 1.5))) + noise(rng));
    }
    const auto r = evaluate_metric(obj, mos);
    CHECK(std::abs(r.plcc) >= std::abs(pearson(obj, mos)) - 1e-9);
    CHECK(r.srocc == spearman(obj, mos));
  }
}

TEST_CASE("rank correlation ignores monotone transforms") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::vector<double> a(50), b(50), ea(50);
  for (int i = 0; i < 50; ++i) {
    a[i] = u(rng);
    b[i] = a[i] + u(rng);
    ea[i] = std::exp(a[i]);
  }
  CHECK(spearman(a, b) == doctest::Approx(spearman(ea, b)).epsilon(1e-15));
  std::vector<double> affine(50);
  for (int i = 0; i < 50; ++i) affine[i] = 3.0 * a[i] - 7.0;
  CHECK(pearson(affine, b) == doctest::Approx(pearson(a, b)).epsilon(1e-12));
}

TEST_CASE("fit preconditions") {
  CHECK_THROWS_AS(fit_logistic(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3, 4}), ArgumentError);
  CHECK_THROWS_AS(fit_logistic(std::vector<double>(6, 1.0), kB), ArgumentError);
  CHECK_THROWS_AS(fit_logistic(std::vector<double>(6, 1.0), std::vector<double>(6, 1.0)), ArgumentError);
}

TEST_CASE("trivial correlation cases") {
  const std::vector<double> up{1, 2, 3, 4, 5, 6};
  const std::vector<double> down{6, 5, 4, 3, 2, 1};
  const auto same = correlations(up, up);
  CHECK(same.plcc == doctest::Approx(1.0));
  CHECK(same.srocc == doctest::Approx(1.0));
  CHECK(same.rmse == 0.0);
  CHECK(correlations(up, down).srocc == doctest::Approx(-1.0));

  std::vector<double> linear;
  for (double x : up) linear.push_back(2.5 * x + 1.0);
  CHECK(evaluate_metric(up, linear).plcc == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(evaluate_metric(up, down).plcc) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("affine rescaling of the subjective list") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<double> obj(40), subj(40), scaled(40);
  for (int i = 0; i < 40; ++i) {
    obj[i] = u(rng);
    subj[i] = obj[i] + u(rng);
    scaled[i] = 4.0 * subj[i] + 9.0;
  }
  const auto a = correlations(obj, subj);
  const auto b = correlations(obj, scaled);
  CHECK(b.plcc == doctest::Approx(a.plcc).epsilon(1e-12));
  CHECK(b.srocc == doctest::Approx(a.srocc).epsilon(1e-12));
  const auto fa = evaluate_metric(obj, subj);
  const auto fb = evaluate_metric(obj, scaled);
  CHECK(fb.plcc == doctest::Approx(fa.plcc).epsilon(1e-6));
  CHECK(fb.rmse == doctest::Approx(4.0 * fa.rmse).epsilon(1e-6));
}

TEST_CASE("grouped evaluation") {
  std::vector<double> obj;
  std::vector<double> subj;
  std::vector<std::string> groups;
  for (int i = 0; i < 12; ++i) {
    obj.push_back(i);
    subj.push_back(i < 6 ? 2.0 * i : 30.0 - i);
    groups.push_back(i < 6 ? "noise" : "quant");
  }
  const auto per = evaluate_grouped(obj, subj, groups);
  REQUIRE(per.size() == 2);
  CHECK(per[0].group == "noise");
  CHECK(per[0].report.plcc == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(per[1].report.srocc == doctest::Approx(-1.0));
  CHECK(per[0].report.n_samples == 6);

  const auto pooled = evaluate_grouped(obj, subj, groups, FitGrouping::pooled);
  CHECK(pooled[0].report.logistic_params == pooled[1].report.logistic_params);
  CHECK(pooled[1].report.srocc == doctest::Approx(-1.0));
  CHECK_THROWS_AS(evaluate_grouped(obj, subj, std::vector<std::string>(3, "x")), ArgumentError);
}
