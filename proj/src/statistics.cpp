#include "mped/statistics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mped/error.hpp"

namespace mped {

namespace {

// 1 / (1 + exp(z)) without overflow.
double inv_logistic(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double sse_of(const LogisticParams& b, std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = logistic_predict(b, x[i]) - y[i];
    s += r * r;
  }
  return s;
}

LogisticFit levenberg_marquardt(LogisticParams b, std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd jac(n, 5);
  Eigen::VectorXd res(n);
  double sse = sse_of(b, x, y);
  double lambda = 1e-3;
  for (int iter = 0; iter < 300 && std::isfinite(sse); ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      const double s = inv_logistic(b[1] * (xi - b[2]));
      const double ds = b[0] * s * (1.0 - s);
      jac(i, 0) = 0.5 - s;
      jac(i, 1) = ds * (xi - b[2]);
      jac(i, 2) = -ds * b[1];
      jac(i, 3) = xi;
      jac(i, 4) = 1.0;
      res(i) = logistic_predict(b, xi) - y[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * res;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::MatrixXd a = jtj;
      for (int k = 0; k < 5; ++k) a(k, k) += lambda * (jtj(k, k) + 1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      LogisticParams trial = b;
      for (int k = 0; k < 5; ++k) trial[k] += step(k);
      const double trial_sse = sse_of(trial, x, y);
      if (std::isfinite(trial_sse) && trial_sse < sse) {
        const double gain = sse - trial_sse;
        b = trial;
        sse = trial_sse;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = gain > 1e-14 * (sse + 1e-300);
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  return {b, sse};
}

}  // namespace

double logistic_predict(const LogisticParams& b, double x) {
  return b[0] * (0.5 - inv_logistic(b[1] * (x - b[2]))) + b[3] * x + b[4];
}

std::vector<double> logistic_predict(const LogisticParams& params, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(logistic_predict(params, x));
  return out;
}

LogisticFit fit_logistic(std::span<const double> objective, std::span<const double> subjective) {
  if (objective.size() != subjective.size()) throw ArgumentError("objective and subjective lengths differ");
  if (objective.size() < 5) throw ArgumentError("logistic fit needs at least 5 pairs");
  const double mx = mean_of(objective);
  const double sx = stddev_of(objective, mx);
  if (!(sx > 0.0)) throw ArgumentError("logistic fit needs a non-constant objective score");
  const double my = mean_of(subjective);
  double sy = stddev_of(subjective, my);
  if (!(sy > 0.0)) sy = 1.0;

  // Fit in standardized coordinates, then map the parameters back.
  std::vector<double> xs(objective.size());
  std::vector<double> ys(subjective.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = (objective[i] - mx) / sx;
    ys[i] = (subjective[i] - my) / sy;
  }
  double cov = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) cov += xs[i] * ys[i];
  const double slope = cov / static_cast<double>(xs.size());
  const double sign = slope < 0.0 ? -1.0 : 1.0;

  std::vector<LogisticParams> starts;
  starts.push_back({0.0, 1.0, 0.0, slope, 0.0});
  for (double b2 : {0.3, 1.0, 3.0, 10.0}) {
    for (double b3 : {-1.0, 0.0, 1.0}) {
      starts.push_back({sign * 3.0, b2, b3, 0.0, 0.0});
      starts.push_back({sign * 2.0, b2, b3, 0.5 * slope, 0.0});
    }
  }
  LogisticFit best{{}, std::numeric_limits<double>::infinity()};
  for (const auto& s : starts) {
    const auto fit = levenberg_marquardt(s, xs, ys);
    if (fit.sse < best.sse) best = fit;
  }

  const auto& b = best.params;
  LogisticFit out;
  out.params = {sy * b[0], b[1] / sx, mx + sx * b[2], sy * b[3] / sx, sy * (b[4] - b[3] * mx / sx) + my};
  out.sse = sse_of(out.params, objective, subjective);
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("pearson inputs differ in length");
  if (a.size() < 2) throw ArgumentError("pearson needs at least 2 samples");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("spearman inputs differ in length");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("rmse inputs differ in length");
  if (a.empty()) throw ArgumentError("rmse needs at least one sample");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

CorrelationReport correlations(std::span<const double> mapped_objective, std::span<const double> subjective) {
  if (mapped_objective.size() != subjective.size()) throw ArgumentError("objective and subjective lengths differ");
  if (mapped_objective.size() < 2) throw ArgumentError("correlations need at least 2 samples");
  CorrelationReport r;
  r.plcc = pearson(mapped_objective, subjective);
  r.srocc = spearman(mapped_objective, subjective);
  r.rmse = rmse(mapped_objective, subjective);
  r.n_samples = subjective.size();
  return r;
}

CorrelationReport evaluate_metric(std::span<const double> objective, std::span<const double> subjective) {
  const auto fit = fit_logistic(objective, subjective);
  const auto mapped = logistic_predict(fit.params, objective);
  auto r = correlations(mapped, subjective);
  // Rank correlation is taken on the raw scores: the fitted map need not be
  // strictly monotone.
  r.srocc = spearman(objective, subjective);
  r.logistic_params = fit.params;
  return r;
}

std::vector<GroupReport> evaluate_grouped(std::span<const double> objective, std::span<const double> subjective,
                                          std::span<const std::string> groups, FitGrouping grouping) {
  if (objective.size() != subjective.size() || groups.size() != objective.size()) {
    throw ArgumentError("objective, subjective and group lists differ in length");
  }
  std::vector<std::string> labels;
  for (const auto& g : groups) {
    if (std::find(labels.begin(), labels.end(), g) == labels.end()) labels.push_back(g);
  }
  std::vector<double> mapped;
  LogisticParams shared{};
  if (grouping == FitGrouping::pooled) {
    shared = fit_logistic(objective, subjective).params;
    mapped = logistic_predict(shared, objective);
  }
  std::vector<GroupReport> out;
  for (const auto& label : labels) {
    std::vector<double> obj;
    std::vector<double> subj;
    std::vector<double> map;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i] != label) continue;
      obj.push_back(objective[i]);
      subj.push_back(subjective[i]);
      if (grouping == FitGrouping::pooled) map.push_back(mapped[i]);
    }
    CorrelationReport r;
    if (grouping == FitGrouping::per_group) {
      r = evaluate_metric(obj, subj);
    } else {
      r = correlations(map, subj);
      r.srocc = spearman(obj, subj);
      r.logistic_params = shared;
    }
    out.push_back({label, r});
  }
  return out;
}

}  // namespace mped
