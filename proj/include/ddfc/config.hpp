#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddfc/dispatch.hpp"
#include "ddfc/estimation.hpp"
#include "ddfc/grid_sim.hpp"

namespace ddfc {

inline constexpr int kSchemaVersion = 1;

struct GeneratorUnit {
    std::string id;
    double rating_MVA = 0.0;
    double dispatch_MW = 0.0;
    double H_s = 0.0;        // inertia on unit rating
    double droop_pct = 0.0;  // 0 = no governor response
};

struct AreaConfig {
    std::string id;
    LcaParams params;
    std::vector<IbrDevice> fleet;
    std::vector<GeneratorUnit> generators;
    std::vector<std::pair<std::string, double>> frequency_weights;
};

struct CollectionConfig {
    double duration_s = 10.0;
    double period_s = 0.1;
    double amplitude_MW = 1.0;
    double frequency_Hz = 6.0;
    double noise_psd = 0.1;
    std::uint64_t seed = 1;
    bool measurement_noise = false;
};

enum class GainSource { lemma, predictor, override_value };

struct ControllerConfig {
    ControllerMode mode = ControllerMode::data_driven;
    Index t_ini = 7;
    double epsilon = 0.1;
    Index truncation_rank = 3;  // 0 = tolerance-mode pseudoinverse
    EstimatorVariant variant = EstimatorVariant::current;
    GainSource gain_source = GainSource::lemma;
    std::optional<double> gain_override;  // DC gain [pu freq / pu power] when gain_source = override
    Index dc_gain_depth = 0;              // 0 = t_ini
    std::optional<double> innovation_clip;
    WindowInit window_init = WindowInit::zero;
};

struct DelayConfig {
    double meas_ms = 300.0;
    double ctrl_ms = 300.0;
};

struct SupportConfig {
    bool enabled = true;
    double deadband_MW = 1.0;
};

struct MetricsConfig {
    double band_hz = 0.01;
    double window_s = 1.0;
};

struct RunConfig {
    double duration_s = 60.0;
    std::uint64_t seed = 1;
};

struct ScenarioConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    std::string description;
    double base_MVA = 100.0;
    double f_nominal_hz = 60.0;
    double period_s = 0.1;
    std::vector<AreaConfig> areas;
    std::vector<TieLine> ties;
    CollectionConfig collection;
    std::vector<ControllerConfig> controllers;  // aligned with areas
    std::vector<DisturbanceEvent> events;
    DelayConfig delays;
    NoiseSpec noise;
    SupportConfig support;
    MetricsConfig metrics;
    RunConfig run;

    Index area_index(const std::string& id) const;
    Index measurement_delay_steps() const;
    Index control_delay_steps() const;
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

std::string to_string(ControllerMode mode);

}  // namespace ddfc
