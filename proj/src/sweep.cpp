#include "mped/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>

#include "mped/baselines.hpp"
#include "mped/energy.hpp"
#include "mped/error.hpp"
#include "mped/statistics.hpp"

namespace mped {

MetricId parse_metric_id(std::string_view name) {
  if (name == "mped_human" || name == "mped-human") return MetricId::mped_human;
  if (name == "mped_machine" || name == "mped-machine") return MetricId::mped_machine;
  if (name == "cd") return MetricId::cd;
  if (name == "psnr_yuv" || name == "psnr-yuv") return MetricId::psnr_yuv;
  if (name == "psnr_p2po" || name == "psnr-p2po") return MetricId::psnr_p2po;
  throw ArgumentError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::mped_human: return "mped_human";
    case MetricId::mped_machine: return "mped_machine";
    case MetricId::cd: return "cd";
    case MetricId::psnr_yuv: return "psnr_yuv";
    case MetricId::psnr_p2po: return "psnr_p2po";
  }
  return "?";
}

double evaluate_metric_id(MetricId id, const PointCloud& pristine, const PointCloud& distorted,
                          const MetricConfig& human, const MetricConfig& machine) {
  switch (id) {
    case MetricId::mped_human: return mped(pristine, distorted, human).pooled;
    case MetricId::mped_machine: return mped(pristine, distorted, machine).pooled;
    case MetricId::cd: return chamfer_distance(pristine, distorted);
    case MetricId::psnr_yuv: return psnr_yuv(pristine, distorted).value;
    case MetricId::psnr_p2po: return psnr_p2po(pristine, distorted).value;
  }
  throw ArgumentError("unknown metric");
}

SweepReport monotonicity_sweep(const PointCloud& cloud, const SweepOptions& options) {
  if (options.levels < 3) throw ArgumentError("a sweep needs at least 3 levels");
  options.human_config.validate();
  options.machine_config.validate();
  const int levels = options.levels;
  std::vector<double> values(static_cast<std::size_t>(levels));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(levels));

#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l < levels; ++l) {
    try {
      const DistortionSpec spec{options.kind, l + 1, options.seed, std::nullopt};
      const auto distorted = apply_distortion(cloud, spec);
      values[l] = evaluate_metric_id(options.metric, cloud, distorted, options.human_config, options.machine_config);
    } catch (...) {
      errors[l] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepReport r;
  r.kind = options.kind;
  r.metric = options.metric;
  r.values = values;
  r.strictly_increasing = true;
  r.strictly_decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) r.strictly_increasing = false;
    if (!(values[i] < values[i - 1])) r.strictly_decreasing = false;
  }
  std::vector<double> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i + 1);
  r.srocc = spearman(values, idx);
  return r;
}

std::string sweep_csv(const std::vector<SweepReport>& reports, std::string_view manifest_ref) {
  std::vector<MetricId> metrics;
  std::vector<DistortionKind> kinds;
  for (const auto& r : reports) {
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
    if (std::find(kinds.begin(), kinds.end(), r.kind) == kinds.end()) kinds.push_back(r.kind);
  }
  std::string out;
  if (!manifest_ref.empty()) out += "# manifest: " + std::string(manifest_ref) + "\n";
  out += "kind,level";
  for (auto m : metrics) out += "," + std::string(to_string(m));
  out += "\n";
  char buf[64];
  for (auto kind : kinds) {
    std::size_t levels = 0;
    for (const auto& r : reports) {
      if (r.kind == kind) levels = std::max(levels, r.values.size());
    }
    for (std::size_t i = 0; i < levels; ++i) {
      out += std::string(to_string(kind)) + "," + std::to_string(i + 1);
      for (auto m : metrics) {
        out += ",";
        for (const auto& r : reports) {
          if (r.kind != kind || r.metric != m || i >= r.values.size()) continue;
          std::snprintf(buf, sizeof(buf), "%.17g", r.values[i]);
          out += buf;
          break;
        }
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace mped
