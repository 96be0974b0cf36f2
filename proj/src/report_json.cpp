#include "mped/report_json.hpp"

#include <cmath>
#include <string>

namespace mped {

namespace {

// JSON has no infinities or NaN; they become null.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json pair(const std::array<double, 2>& v) { return {number(v[0]), number(v[1])}; }

}  // namespace

nlohmann::json to_json(const EnergyReport& report) {
  nlohmann::json per_scale = nlohmann::json::object();
  for (std::size_t i = 0; i < report.scales.size(); ++i) {
    per_scale[std::to_string(report.scales[i])] = number(report.per_scale[i]);
  }
  nlohmann::json j{
      {"variant", std::string(to_string(report.variant))},
      {"psi", report.scales},
      {"per_scale", per_scale},
      {"pooled", number(report.pooled)},
      {"L", report.center_count},
  };
  if (report.intrinsic_resolution) {
    nlohmann::json ir = nlohmann::json::object();
    for (std::size_t i = 0; i < report.scales.size(); ++i) {
      ir[std::to_string(report.scales[i])] = number((*report.intrinsic_resolution)[i]);
    }
    j["ir"] = ir;
  } else {
    j["ir"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const BaselineScore& score) {
  return {
      {"metric", std::string(to_string(score.kind))},
      {"value", number(score.value)},
      {"direction", score.direction == ScoreDirection::higher_better ? "higher_better" : "lower_better"},
      {"identical", score.identical},
  };
}

nlohmann::json to_json(const MetricConfig& c) {
  return {
      {"psi", c.scales},
      {"p", c.p},
      {"sigma", c.sigma},
      {"color_weights", c.color_weights},
      {"alpha", c.alpha},
      {"beta_power", c.beta_power},
      {"variant", std::string(to_string(c.variant))},
      {"color_space", std::string(to_string(c.color_space))},
      {"hf_filter_length", c.hf_filter_length},
      {"center_ratio", c.center_ratio},
      {"field_one", c.unit_field},
  };
}

nlohmann::json to_json(const ProbeReport& r) {
  nlohmann::json j{
      {"probe", std::string(to_string(r.probe))},
      {"cd", pair(r.cd)},
      {"emd", pair(r.emd)},
      {"ped", pair(r.ped)},
      {"separated", r.separated},
  };
  j["psnr_yuv"] = r.psnr_yuv ? pair(*r.psnr_yuv) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const CorrelationReport& r) {
  return {
      {"plcc", number(r.plcc)},
      {"srocc", number(r.srocc)},
      {"rmse", number(r.rmse)},
      {"logistic_params", r.logistic_params},
      {"n", r.n_samples},
  };
}

nlohmann::json to_json(const SweepReport& r) {
  nlohmann::json values = nlohmann::json::array();
  for (double v : r.values) values.push_back(number(v));
  return {
      {"distortion", std::string(to_string(r.kind))},
      {"metric", std::string(to_string(r.metric))},
      {"values", values},
      {"strictly_increasing", r.strictly_increasing},
      {"strictly_decreasing", r.strictly_decreasing},
      {"srocc", number(r.srocc)},
  };
}

}  // namespace mped
