#include "ddfc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace ddfc {

namespace {

using nlohmann::json;

template <typename T>
T field(const json& j, const char* key, const T& fallback, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing required field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

const json& object_or_empty(const json& j, const char* key) {
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    const json& v = j.at(key);
    if (!v.is_object()) throw ConfigError(std::string(key) + " must be an object");
    return v;
}

ControllerMode parse_mode(const std::string& s, const std::string& where) {
    if (s == "off") return ControllerMode::off;
    if (s == "data_driven") return ControllerMode::data_driven;
    if (s == "model_based") return ControllerMode::model_based;
    throw ConfigError(where + ": unknown controller mode '" + s + "'");
}

GainSource parse_gain_source(const std::string& s, const std::string& where) {
    if (s == "lemma") return GainSource::lemma;
    if (s == "predictor") return GainSource::predictor;
    if (s == "override") return GainSource::override_value;
    throw ConfigError(where + ": unknown gain_source '" + s + "'");
}

std::string to_string(GainSource g) {
    switch (g) {
        case GainSource::lemma: return "lemma";
        case GainSource::predictor: return "predictor";
        case GainSource::override_value: return "override";
    }
    return "lemma";
}

EventKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "step_load") return EventKind::step_load;
    if (s == "ramp") return EventKind::ramp;
    if (s == "generator_trip") return EventKind::generator_trip;
    throw ConfigError(where + ": unknown event kind '" + s + "'");
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::step_load: return "step_load";
        case EventKind::ramp: return "ramp";
        case EventKind::generator_trip: return "generator_trip";
    }
    return "step_load";
}

ControllerConfig parse_controller(const json& j, const ControllerConfig& base, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    ControllerConfig c = base;
    if (j.contains("mode")) c.mode = parse_mode(required<std::string>(j, "mode", where), where);
    c.t_ini = field<Index>(j, "T_ini", c.t_ini, where);
    c.epsilon = field<double>(j, "epsilon", c.epsilon, where);
    c.truncation_rank = field<Index>(j, "truncation_rank", c.truncation_rank, where);
    c.dc_gain_depth = field<Index>(j, "dc_gain_depth", c.dc_gain_depth, where);
    if (j.contains("variant")) {
        const auto v = required<std::string>(j, "variant", where);
        if (v == "current") c.variant = EstimatorVariant::current;
        else if (v == "predictive") c.variant = EstimatorVariant::predictive;
        else throw ConfigError(where + ": unknown estimator variant '" + v + "'");
    }
    if (j.contains("gain_source")) c.gain_source = parse_gain_source(required<std::string>(j, "gain_source", where), where);
    if (j.contains("gain_override")) {
        if (j.at("gain_override").is_null()) c.gain_override.reset();
        else c.gain_override = required<double>(j, "gain_override", where);
    }
    if (j.contains("innovation_clip")) {
        if (j.at("innovation_clip").is_null()) c.innovation_clip.reset();
        else c.innovation_clip = required<double>(j, "innovation_clip", where);
    }
    if (j.contains("window_init")) {
        const auto w = required<std::string>(j, "window_init", where);
        if (w == "zero") c.window_init = WindowInit::zero;
        else if (w == "warm_up") c.window_init = WindowInit::warm_up;
        else throw ConfigError(where + ": unknown window_init '" + w + "'");
    }

    if (c.t_ini < 1) throw ConfigError(where + ": T_ini must be >= 1");
    if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) throw ConfigError(where + ": epsilon must be positive");
    if (c.truncation_rank < 0) throw ConfigError(where + ": truncation_rank must be >= 0");
    if (c.dc_gain_depth < 0) throw ConfigError(where + ": dc_gain_depth must be >= 0");
    if (c.gain_source == GainSource::override_value && !c.gain_override) {
        throw ConfigError(where + ": gain_source 'override' needs gain_override");
    }
    if (c.gain_override && !(std::isfinite(*c.gain_override) && *c.gain_override != 0.0)) {
        throw ConfigError(where + ": gain_override must be finite and nonzero");
    }
    if (c.innovation_clip && !(*c.innovation_clip > 0.0)) throw ConfigError(where + ": innovation_clip must be positive");
    return c;
}

json controller_json(const ControllerConfig& c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["T_ini"] = c.t_ini;
    j["epsilon"] = c.epsilon;
    j["truncation_rank"] = c.truncation_rank;
    j["dc_gain_depth"] = c.dc_gain_depth;
    j["variant"] = c.variant == EstimatorVariant::current ? "current" : "predictive";
    j["gain_source"] = to_string(c.gain_source);
    j["gain_override"] = c.gain_override ? json(*c.gain_override) : json(nullptr);
    j["innovation_clip"] = c.innovation_clip ? json(*c.innovation_clip) : json(nullptr);
    j["window_init"] = c.window_init == WindowInit::zero ? "zero" : "warm_up";
    return j;
}

LcaParams parse_params(const json& j, const LcaParams& fallback, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    LcaParams p = fallback;
    p.H = field<double>(j, "H", p.H, where);
    p.R_I = field<double>(j, "R_I", p.R_I, where);
    p.R_g = field<double>(j, "R_g", p.R_g, where);
    p.T_R = field<double>(j, "T_R", p.T_R, where);
    p.F_H = field<double>(j, "F_H", p.F_H, where);
    p.extra_lags = field<std::vector<double>>(j, "extra_lags", p.extra_lags, where);
    return p;
}

json params_json(const LcaParams& p) {
    return json{{"H", p.H}, {"R_I", p.R_I}, {"R_g", p.R_g}, {"T_R", p.T_R}, {"F_H", p.F_H}, {"extra_lags", p.extra_lags}};
}

IbrDevice parse_ibr(const json& j, const std::string& where) {
    IbrDevice d;
    d.id = required<std::string>(j, "id", where);
    d.rating_MVA = field<double>(j, "rating_MVA", d.rating_MVA, where);
    d.dispatch_MW = field<double>(j, "dispatch_MW", d.dispatch_MW, where);
    d.p_min_MW = field<double>(j, "p_min_MW", d.p_min_MW, where);
    d.p_max_MW = field<double>(j, "p_max_MW", d.rating_MVA, where);
    d.participation = field<double>(j, "participation", d.participation, where);
    d.droop_pct = field<double>(j, "droop_pct", d.droop_pct, where);
    d.validate();
    return d;
}

GeneratorUnit parse_generator(const json& j, const std::string& where) {
    GeneratorUnit g;
    g.id = required<std::string>(j, "id", where);
    g.rating_MVA = required<double>(j, "rating_MVA", where);
    g.dispatch_MW = field<double>(j, "dispatch_MW", 0.0, where);
    g.H_s = field<double>(j, "H_s", 0.0, where);
    g.droop_pct = field<double>(j, "droop_pct", 0.0, where);
    if (!(g.rating_MVA > 0.0)) throw ConfigError(where + ": generator rating must be positive");
    if (g.H_s < 0.0 || g.droop_pct < 0.0) throw ConfigError(where + ": generator H_s and droop_pct must be >= 0");
    return g;
}

// Aggregate governor droop from the units that carry one; 1/R_g = sum (S/S_base)/R.
std::optional<double> governor_droop(const std::vector<GeneratorUnit>& gens, double base) {
    double inv = 0.0;
    for (const auto& g : gens) {
        if (g.droop_pct > 0.0) inv += (g.rating_MVA / base) / (g.droop_pct / 100.0);
    }
    if (inv <= 0.0) return std::nullopt;
    return 1.0 / inv;
}

AreaConfig parse_area(const json& j, double base, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    AreaConfig a;
    a.id = required<std::string>(j, "id", where);
    const std::string w = "area '" + a.id + "'";
    if (j.contains("generators")) {
        for (const auto& g : j.at("generators")) a.generators.push_back(parse_generator(g, w + ".generators"));
    }
    if (j.contains("fleet")) {
        for (const auto& d : j.at("fleet")) a.fleet.push_back(parse_ibr(d, w + ".fleet"));
    }
    if (a.fleet.empty()) throw ConfigError(w + ": fleet must list at least one IBR");

    // Missing aggregates are derived from the unit lists.
    LcaParams derived;
    derived.S_base_MVA = base;
    double inertia = 0.0;
    for (const auto& g : a.generators) inertia += g.H_s * g.rating_MVA / base;
    if (inertia > 0.0) derived.H = inertia;
    if (auto rg = governor_droop(a.generators, base)) derived.R_g = *rg;
    double inv_ri = 0.0;
    for (const auto& d : a.fleet) inv_ri += (d.rating_MVA / base) / (d.droop_pct / 100.0);
    derived.R_I = 1.0 / inv_ri;

    a.params = parse_params(object_or_empty(j, "params"), derived, w + ".params");
    a.params.S_base_MVA = base;
    a.params.validate();

    const json& fm = object_or_empty(j, "frequency_measurement");
    const auto mode = field<std::string>(fm, "mode", "single", w + ".frequency_measurement");
    if (mode == "weighted") {
        if (!fm.contains("weights") || !fm.at("weights").is_array()) {
            throw ConfigError(w + ".frequency_measurement: weighted mode needs a weights array");
        }
        for (const auto& e : fm.at("weights")) {
            a.frequency_weights.emplace_back(required<std::string>(e, "area", w + ".weights"),
                                             required<double>(e, "weight", w + ".weights"));
        }
        if (a.frequency_weights.empty()) throw ConfigError(w + ": weighted frequency measurement needs weights");
    } else if (mode != "single") {
        throw ConfigError(w + ".frequency_measurement: unknown mode '" + mode + "'");
    }
    return a;
}

json area_json(const AreaConfig& a) {
    json j;
    j["id"] = a.id;
    j["params"] = params_json(a.params);
    j["generators"] = json::array();
    for (const auto& g : a.generators) {
        j["generators"].push_back({{"id", g.id},
                                   {"rating_MVA", g.rating_MVA},
                                   {"dispatch_MW", g.dispatch_MW},
                                   {"H_s", g.H_s},
                                   {"droop_pct", g.droop_pct}});
    }
    j["fleet"] = json::array();
    for (const auto& d : a.fleet) {
        j["fleet"].push_back({{"id", d.id},
                              {"rating_MVA", d.rating_MVA},
                              {"dispatch_MW", d.dispatch_MW},
                              {"p_min_MW", d.p_min_MW},
                              {"p_max_MW", d.p_max_MW},
                              {"participation", d.participation},
                              {"droop_pct", d.droop_pct}});
    }
    if (a.frequency_weights.empty()) {
        j["frequency_measurement"] = {{"mode", "single"}};
    } else {
        json weights = json::array();
        for (const auto& [id, w] : a.frequency_weights) weights.push_back({{"area", id}, {"weight", w}});
        j["frequency_measurement"] = {{"mode", "weighted"}, {"weights", weights}};
    }
    return j;
}

DisturbanceEvent parse_event(const json& j, const ScenarioConfig& c, const std::string& where) {
    DisturbanceEvent ev;
    ev.kind = parse_kind(required<std::string>(j, "kind", where), where);
    ev.area = required<std::string>(j, "area", where);
    ev.bus_label = field<std::string>(j, "bus", "", where);
    ev.start_s = required<double>(j, "start_s", where);
    ev.ramp_rate_MW_per_s = field<double>(j, "ramp_rate_MW_per_s", 0.0, where);
    ev.unit = field<std::string>(j, "unit", "", where);
    const Index a = c.area_index(ev.area);
    const AreaConfig& area = c.areas[static_cast<std::size_t>(a)];

    if (ev.kind == EventKind::generator_trip) {
        const GeneratorUnit* unit = nullptr;
        for (const auto& g : area.generators) {
            if (g.id == ev.unit) unit = &g;
        }
        if (!unit && (!j.contains("magnitude_MW") || !j.contains("param_switch"))) {
            throw ConfigError(where + ": unknown unit '" + ev.unit + "' in area '" + ev.area +
                              "' (give magnitude_MW and param_switch explicitly otherwise)");
        }
        ev.magnitude_MW = j.contains("magnitude_MW") ? required<double>(j, "magnitude_MW", where) : unit->dispatch_MW;
        if (j.contains("param_switch")) {
            LcaParams p = parse_params(j.at("param_switch"), area.params, where + ".param_switch");
            p.S_base_MVA = c.base_MVA;
            ev.param_switch = p;
        } else {
            // Remove the unit's inertia and governor contribution from the aggregates.
            LcaParams p = area.params;
            p.H -= unit->H_s * unit->rating_MVA / c.base_MVA;
            if (unit->droop_pct > 0.0) {
                const double inv = 1.0 / p.R_g - (unit->rating_MVA / c.base_MVA) / (unit->droop_pct / 100.0);
                if (!(inv > 0.0)) throw ConfigError(where + ": trip removes all governor response in '" + ev.area + "'");
                p.R_g = 1.0 / inv;
            }
            ev.param_switch = p;
        }
        ev.param_switch->validate();
    } else {
        ev.magnitude_MW = required<double>(j, "magnitude_MW", where);
        if (ev.kind == EventKind::ramp && !(ev.ramp_rate_MW_per_s > 0.0)) {
            throw ConfigError(where + ": ramp needs a positive ramp_rate_MW_per_s");
        }
    }
    if (!std::isfinite(ev.magnitude_MW)) throw ConfigError(where + ": magnitude must be finite");
    return ev;
}

json event_json(const DisturbanceEvent& ev) {
    json j;
    j["kind"] = to_string(ev.kind);
    j["area"] = ev.area;
    j["bus"] = ev.bus_label;
    j["start_s"] = ev.start_s;
    j["magnitude_MW"] = ev.magnitude_MW;
    if (ev.kind == EventKind::ramp) j["ramp_rate_MW_per_s"] = ev.ramp_rate_MW_per_s;
    if (!ev.unit.empty()) j["unit"] = ev.unit;
    if (ev.param_switch) j["param_switch"] = params_json(*ev.param_switch);
    return j;
}

bool on_grid(double t, double period) {
    const double k = std::round(t / period);
    return std::abs(t - k * period) <= 1e-9;
}

Index delay_steps(double ms, double period, const char* what) {
    const double s = ms / 1000.0;
    if (s < 0.0 || !on_grid(s, period)) {
        throw ConfigError(std::string("delays.") + what + " must be a non-negative multiple of the sampling period");
    }
    return static_cast<Index>(std::llround(s / period));
}

}  // namespace

std::string to_string(ControllerMode mode) {
    switch (mode) {
        case ControllerMode::off: return "off";
        case ControllerMode::data_driven: return "data_driven";
        case ControllerMode::model_based: return "model_based";
    }
    return "off";
}

Index ScenarioConfig::area_index(const std::string& id) const {
    for (std::size_t i = 0; i < areas.size(); ++i) {
        if (areas[i].id == id) return static_cast<Index>(i);
    }
    throw ConfigError("unknown area id '" + id + "'");
}

Index ScenarioConfig::measurement_delay_steps() const { return delay_steps(delays.meas_ms, period_s, "meas_ms"); }
Index ScenarioConfig::control_delay_steps() const { return delay_steps(delays.ctrl_ms, period_s, "ctrl_ms"); }

ScenarioConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    ScenarioConfig c;
    c.schema_version = required<int>(j, "schema_version", "scenario");
    if (c.schema_version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version) + " (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    c.name = field<std::string>(j, "name", "", "scenario");
    c.description = field<std::string>(j, "description", "", "scenario");
    c.base_MVA = field<double>(j, "base_MVA", c.base_MVA, "scenario");
    c.f_nominal_hz = field<double>(j, "f_nominal_hz", c.f_nominal_hz, "scenario");
    c.period_s = field<double>(j, "period_s", c.period_s, "scenario");
    if (!(c.base_MVA > 0.0) || !(c.f_nominal_hz > 0.0) || !(c.period_s > 0.0)) {
        throw ConfigError("base_MVA, f_nominal_hz and period_s must be positive");
    }

    if (!j.contains("areas") || !j.at("areas").is_array() || j.at("areas").empty()) {
        throw ConfigError("scenario needs a non-empty 'areas' array");
    }
    std::set<std::string> ids;
    for (const auto& a : j.at("areas")) {
        c.areas.push_back(parse_area(a, c.base_MVA, "areas[" + std::to_string(c.areas.size()) + "]"));
        if (!ids.insert(c.areas.back().id).second) throw ConfigError("duplicate area id '" + c.areas.back().id + "'");
    }
    for (const auto& a : c.areas) {
        for (const auto& [id, w] : a.frequency_weights) {
            c.area_index(id);
            if (!(w >= 0.0)) throw ConfigError("area '" + a.id + "': frequency weights must be >= 0");
        }
    }

    if (j.contains("ties")) {
        for (const auto& t : j.at("ties")) {
            TieLine tie;
            tie.area_a = required<std::string>(t, "from", "ties");
            tie.area_b = required<std::string>(t, "to", "ties");
            tie.T_ab = field<double>(t, "T", tie.T_ab, "ties");
            c.area_index(tie.area_a);
            c.area_index(tie.area_b);
            if (tie.area_a == tie.area_b) throw ConfigError("tie connects area '" + tie.area_a + "' to itself");
            if (!(tie.T_ab > 0.0)) throw ConfigError("tie synchronizing coefficient must be positive");
            c.ties.push_back(tie);
        }
    }

    const json& col = object_or_empty(j, "collection");
    c.collection.duration_s = field<double>(col, "duration_s", c.collection.duration_s, "collection");
    c.collection.period_s = field<double>(col, "period_s", c.period_s, "collection");
    c.collection.amplitude_MW = field<double>(col, "amplitude_MW", c.collection.amplitude_MW, "collection");
    c.collection.frequency_Hz = field<double>(col, "frequency_Hz", c.collection.frequency_Hz, "collection");
    c.collection.noise_psd = field<double>(col, "noise_psd", c.collection.noise_psd, "collection");
    c.collection.seed = field<std::uint64_t>(col, "seed", c.collection.seed, "collection");
    c.collection.measurement_noise = field<bool>(col, "measurement_noise", c.collection.measurement_noise, "collection");
    if (std::abs(c.collection.period_s - c.period_s) > 1e-12) {
        throw ConfigError("collection.period_s must equal the scenario period_s");
    }
    if (!(c.collection.duration_s > 0.0) || !on_grid(c.collection.duration_s, c.period_s)) {
        throw ConfigError("collection.duration_s must be a positive multiple of the period");
    }
    if (c.collection.amplitude_MW < 0.0 || c.collection.noise_psd < 0.0) {
        throw ConfigError("collection amplitude and noise_psd must be >= 0");
    }

    const json& ctl = object_or_empty(j, "controller");
    const ControllerConfig base = ctl.contains("default") ? parse_controller(ctl.at("default"), {}, "controller.default")
                                                          : ControllerConfig{};
    c.controllers.assign(c.areas.size(), base);
    if (ctl.contains("per_area")) {
        const json& per = ctl.at("per_area");
        if (!per.is_object()) throw ConfigError("controller.per_area must be an object keyed by area id");
        for (auto it = per.begin(); it != per.end(); ++it) {
            const Index a = c.area_index(it.key());
            c.controllers[static_cast<std::size_t>(a)] = parse_controller(it.value(), base, "controller." + it.key());
        }
    }

    const json& del = object_or_empty(j, "delays");
    c.delays.meas_ms = field<double>(del, "meas_ms", c.delays.meas_ms, "delays");
    c.delays.ctrl_ms = field<double>(del, "ctrl_ms", c.delays.ctrl_ms, "delays");
    c.measurement_delay_steps();
    c.control_delay_steps();

    const json& run = object_or_empty(j, "run");
    c.run.duration_s = field<double>(run, "duration_s", c.run.duration_s, "run");
    c.run.seed = field<std::uint64_t>(run, "seed", c.run.seed, "run");
    if (!(c.run.duration_s > 0.0) || !on_grid(c.run.duration_s, c.period_s)) {
        throw ConfigError("run.duration_s must be a positive multiple of the period");
    }

    const json& noise = object_or_empty(j, "noise");
    c.noise.freq_std_pu = field<double>(noise, "freq_std_pu", 1e-6, "noise");
    c.noise.tie_std_pu = field<double>(noise, "tie_std_pu", 2e-2, "noise");
    c.noise.seed = c.run.seed;
    if (c.noise.freq_std_pu < 0.0 || c.noise.tie_std_pu < 0.0) throw ConfigError("noise levels must be >= 0");

    const json& sup = object_or_empty(j, "support");
    c.support.enabled = field<bool>(sup, "enabled", c.support.enabled, "support");
    c.support.deadband_MW = field<double>(sup, "deadband_MW", c.support.deadband_MW, "support");
    if (c.support.deadband_MW < 0.0) throw ConfigError("support.deadband_MW must be >= 0");

    const json& met = object_or_empty(j, "metrics");
    c.metrics.band_hz = field<double>(met, "band_hz", c.metrics.band_hz, "metrics");
    c.metrics.window_s = field<double>(met, "window_s", c.metrics.window_s, "metrics");
    if (!(c.metrics.band_hz > 0.0) || c.metrics.window_s < 0.0) throw ConfigError("metrics band/window invalid");

    if (j.contains("events")) {
        for (const auto& e : j.at("events")) {
            const std::string where = "events[" + std::to_string(c.events.size()) + "]";
            DisturbanceEvent ev = parse_event(e, c, where);
            if (ev.start_s < 0.0 || !on_grid(ev.start_s, c.period_s)) {
                throw ConfigError(where + ": start_s must be a non-negative multiple of period_s");
            }
            c.events.push_back(std::move(ev));
        }
    }
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file", path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["description"] = c.description;
    j["base_MVA"] = c.base_MVA;
    j["f_nominal_hz"] = c.f_nominal_hz;
    j["period_s"] = c.period_s;
    j["areas"] = json::array();
    for (const auto& a : c.areas) j["areas"].push_back(area_json(a));
    j["ties"] = json::array();
    for (const auto& t : c.ties) j["ties"].push_back({{"from", t.area_a}, {"to", t.area_b}, {"T", t.T_ab}});
    j["collection"] = {{"duration_s", c.collection.duration_s},
                       {"period_s", c.collection.period_s},
                       {"amplitude_MW", c.collection.amplitude_MW},
                       {"frequency_Hz", c.collection.frequency_Hz},
                       {"noise_psd", c.collection.noise_psd},
                       {"seed", c.collection.seed},
                       {"measurement_noise", c.collection.measurement_noise}};
    json per = json::object();
    for (std::size_t i = 0; i < c.areas.size(); ++i) per[c.areas[i].id] = controller_json(c.controllers[i]);
    j["controller"] = {{"per_area", per}};
    j["events"] = json::array();
    for (const auto& ev : c.events) j["events"].push_back(event_json(ev));
    j["delays"] = {{"meas_ms", c.delays.meas_ms}, {"ctrl_ms", c.delays.ctrl_ms}};
    j["noise"] = {{"freq_std_pu", c.noise.freq_std_pu}, {"tie_std_pu", c.noise.tie_std_pu}};
    j["support"] = {{"enabled", c.support.enabled}, {"deadband_MW", c.support.deadband_MW}};
    j["metrics"] = {{"band_hz", c.metrics.band_hz}, {"window_s", c.metrics.window_s}};
    j["run"] = {{"duration_s", c.run.duration_s}, {"seed", c.run.seed}};
    return j;
}

}  // namespace ddfc
