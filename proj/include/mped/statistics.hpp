#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mped {

/// Monotone logistic with a linear tail:
///   f(x) = b1 * (0.5 - 1 / (1 + exp(b2 * (x - b3)))) + b4 * x + b5
using LogisticParams = std::array<double, 5>;

double logistic_predict(const LogisticParams& params, double x);
std::vector<double> logistic_predict(const LogisticParams& params, std::span<const double> xs);

struct LogisticFit {
  LogisticParams params{};
  double sse = 0.0;
};

/// Multi-start Levenberg-Marquardt least squares. Needs >= 5 pairs and a
/// non-constant objective (ArgumentError otherwise).
LogisticFit fit_logistic(std::span<const double> objective, std::span<const double> subjective);

double pearson(std::span<const double> a, std::span<const double> b);
/// Pearson over average ranks.
double spearman(std::span<const double> a, std::span<const double> b);
double rmse(std::span<const double> a, std::span<const double> b);
/// 1-based ranks, ties receive the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct CorrelationReport {
  double plcc = 0.0;
  double srocc = 0.0;
  double rmse = 0.0;
  LogisticParams logistic_params{};
  std::size_t n_samples = 0;
};

/// Statistics between already-mapped objective scores and subjective scores.
/// Throws ArgumentError on length mismatch or fewer than 2 samples. A
/// constant input yields NaN correlations.
CorrelationReport correlations(std::span<const double> mapped_objective, std::span<const double> subjective);

/// fit_logistic, map, then correlations.
CorrelationReport evaluate_metric(std::span<const double> objective, std::span<const double> subjective);

enum class FitGrouping { per_group, pooled };

struct GroupReport {
  std::string group;
  CorrelationReport report;
};

/// Correlations per group label, groups in first-seen order. per_group fits
/// one logistic per group; pooled fits a single mapping over every sample and
/// scores each group with it.
std::vector<GroupReport> evaluate_grouped(std::span<const double> objective, std::span<const double> subjective,
                                          std::span<const std::string> groups,
                                          FitGrouping grouping = FitGrouping::per_group);

}  // namespace mped
