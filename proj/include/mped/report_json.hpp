#pragma once

#include <json.hpp>

#include "mped/baselines.hpp"
#include "mped/config.hpp"
#include "mped/energy.hpp"
#include "mped/probes.hpp"
#include "mped/statistics.hpp"
#include "mped/sweep.hpp"

namespace mped {

/// {variant, psi, per_scale: {K: value}, pooled, L, ir}
nlohmann::json to_json(const EnergyReport& report);
nlohmann::json to_json(const BaselineScore& score);
nlohmann::json to_json(const MetricConfig& config);
nlohmann::json to_json(const ProbeReport& report);
nlohmann::json to_json(const CorrelationReport& report);
nlohmann::json to_json(const SweepReport& report);

}  // namespace mped
