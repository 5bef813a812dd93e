#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddfc/config.hpp"
#include "ddfc/dispatch.hpp"
#include "ddfc/metrics.hpp"
#include "ddfc/signal.hpp"

namespace ddfc {

struct RunResult {
    Traces traces;
    Metrics metrics;
    nlohmann::json config_echo;
    std::string version;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
    std::size_t conservation_violations = 0;
    bool support_activated = false;
    double max_remainder_MW = 0.0;
};

// Datasets keyed by area id; required for every data-driven area.
using DatasetMap = std::map<std::string, TrajectoryDataset>;

/// Builds the estimator for one area. Errors carry the area id.
AreaController build_controller(const ScenarioConfig& config, Index area, const DatasetMap& datasets,
                                std::vector<std::string>* warnings = nullptr);

// DC gain of the recursion y = M [w_p; y_p; 0] under constant w.
double predictor_dc_gain(const Predictor& predictor);

RunResult run_scenario(const ScenarioConfig& config, const DatasetMap& datasets);

double last_event_time(const ScenarioConfig& config);

std::string library_version();

}  // namespace ddfc
