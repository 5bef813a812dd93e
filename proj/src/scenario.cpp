#include "ddfc/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "ddfc/collection.hpp"

#ifndef DDFC_VERSION
#define DDFC_VERSION "0.0.0"
#endif

namespace ddfc {

std::string library_version() { return DDFC_VERSION; }

double predictor_dc_gain(const Predictor& predictor) {
    const PredictorLayout& lay = predictor.layout;
    if (!lay.drop_d_channel || lay.m != 1 || lay.p != 1) {
        throw std::invalid_argument("predictor_dc_gain: needs a single-channel lumped predictor");
    }
    const Matrix& M = predictor.matrix;
    const double w_sum = M.block(0, lay.u_past_offset(), 1, lay.t_ini).sum() + M(0, lay.u_now_offset());
    const double y_sum = M.block(0, lay.y_past_offset(), 1, lay.t_ini).sum();
    if (!(std::abs(1.0 - y_sum) > 1e-12)) throw InfeasibleError("predictor recursion has no finite DC gain");
    return w_sum / (1.0 - y_sum);
}

AreaController build_controller(const ScenarioConfig& config, Index area, const DatasetMap& datasets,
                                std::vector<std::string>* warnings) {
    const AreaConfig& a = config.areas.at(static_cast<std::size_t>(area));
    const ControllerConfig& cc = config.controllers.at(static_cast<std::size_t>(area));
    AreaController ctrl(a.id, a.fleet, config.control_delay_steps(), config.base_MVA);
    const std::string where = "area '" + a.id + "': ";
    try {
        if (cc.mode == ControllerMode::data_driven) {
            const auto it = datasets.find(a.id);
            if (it == datasets.end()) throw ConfigError("no dataset for data-driven controller");
            const TrajectoryDataset& ds = it->second;
            if (ds.m() != 1 || ds.q() != 1 || ds.p() != 1) throw ConfigError("dataset must be single-channel");
            if (std::abs(ds.period_s() - config.period_s) > 1e-12) {
                throw ConfigError("dataset period differs from the scenario period");
            }
            std::optional<Regularization> reg;
            if (cc.truncation_rank > 0) reg = RankMode{cc.truncation_rank};
            Predictor pred = predictor_matrix(ds, cc.t_ini, true, reg);
            if (warnings) {
                for (const auto& w : pred.warnings) warnings->push_back(where + w);
            }
            double G = 0.0;
            switch (cc.gain_source) {
                case GainSource::lemma: {
                    const Index depth = cc.dc_gain_depth > 0 ? cc.dc_gain_depth : cc.t_ini;
                    G = dc_gain_data(ds, depth, true)(0, 0);
                    break;
                }
                case GainSource::predictor: G = predictor_dc_gain(pred); break;
                case GainSource::override_value: G = *cc.gain_override; break;
            }
            if (!std::isfinite(G) || G == 0.0) throw InfeasibleError("DC gain estimate is zero or non-finite");
            const Matrix L = low_gain_rule(Matrix::Constant(1, 1, G));
            ctrl.use_data_driven(
                DataDrivenEstimator(std::move(pred), L, DataDrivenConfig{cc.epsilon, cc.innovation_clip, cc.window_init}));
        } else if (cc.mode == ControllerMode::model_based) {
            LtiModel model = lumped_area_model(a.params, config.period_s);
            const Matrix L = low_gain_rule(dc_gain_model(model).G);
            ctrl.use_model_based(
                LowGainEstimator(std::move(model), L, LowGainConfig{cc.epsilon, cc.variant, cc.innovation_clip}));
        }
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(where + e.what(), e.achieved_rank(), e.required_rank());
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + e.what());
    }
    return ctrl;
}

double last_event_time(const ScenarioConfig& config) {
    double t = 0.0;
    for (const auto& ev : config.events) {
        double end = ev.start_s;
        if (ev.kind == EventKind::ramp) end += std::abs(ev.magnitude_MW) / ev.ramp_rate_MW_per_s;
        t = std::max(t, end);
    }
    return t;
}

namespace {

struct AreaColumns {
    std::size_t df_true, df_meas, tie_true, tie_meas, load_true, d_hat, y_hat, request, allocated, remainder, support,
        ibr_applied, first_setpoint;
};

// Left-to-right sum, the order the conservation guarantee is stated in.
double ordered_sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const DatasetMap& datasets) {
    RunResult result;
    result.config_echo = to_json(config);
    result.version = library_version();
    result.seed = config.run.seed;

    const std::size_t K = config.areas.size();
    std::vector<AreaController> controllers;
    controllers.reserve(K);
    for (std::size_t a = 0; a < K; ++a) {
        controllers.push_back(build_controller(config, static_cast<Index>(a), datasets, &result.warnings));
    }

    NoiseSpec noise = config.noise;
    noise.seed = config.run.seed;
    Network net = make_network(config, true, noise);

    // Tie adjacency for support requests.
    std::vector<std::vector<std::size_t>> neighbors(K);
    for (const auto& tie : config.ties) {
        const auto i = static_cast<std::size_t>(config.area_index(tie.area_a));
        const auto j = static_cast<std::size_t>(config.area_index(tie.area_b));
        if (std::find(neighbors[i].begin(), neighbors[i].end(), j) == neighbors[i].end()) neighbors[i].push_back(j);
        if (std::find(neighbors[j].begin(), neighbors[j].end(), i) == neighbors[j].end()) neighbors[j].push_back(i);
    }

    Traces& tr = result.traces;
    std::vector<AreaColumns> cols(K);
    for (std::size_t a = 0; a < K; ++a) {
        const std::string& id = config.areas[a].id;
        AreaColumns& c = cols[a];
        c.df_true = tr.add_column(column::df_true(id));
        c.df_meas = tr.add_column(column::df_meas(id));
        c.tie_true = tr.add_column(column::tie_true(id));
        c.tie_meas = tr.add_column(column::tie_meas(id));
        c.load_true = tr.add_column(column::load_true(id));
        c.d_hat = tr.add_column(column::d_hat(id));
        c.y_hat = tr.add_column(column::y_hat(id));
        c.request = tr.add_column(column::request(id));
        c.allocated = tr.add_column(column::allocated(id));
        c.remainder = tr.add_column(column::remainder(id));
        c.support = tr.add_column(column::support(id));
        c.ibr_applied = tr.add_column(column::ibr_applied(id));
        c.first_setpoint = tr.column_count();
        for (const auto& dev : config.areas[a].fleet) tr.add_column(column::setpoint(id, dev.id));
    }

    const double base = config.base_MVA;
    const double fn = config.f_nominal_hz;
    const Index steps = static_cast<Index>(std::llround(config.run.duration_s / config.period_s)) + 1;
    std::vector<std::vector<double>> command(K);
    for (std::size_t a = 0; a < K; ++a) command[a].assign(config.areas[a].fleet.size(), 0.0);
    std::vector<double> row(tr.column_count());
    Vector ibr(static_cast<Index>(K));
    std::vector<double> applied_MW(K), request(K), support(K);
    std::vector<Allocation> own(K), final_alloc(K);

    for (Index k = 0; k < steps; ++k) {
        for (std::size_t a = 0; a < K; ++a) {
            applied_MW[a] = ordered_sum(controllers[a].delay_command(command[a]));
            ibr(static_cast<Index>(a)) = applied_MW[a] / base;
        }
        const StepRecord rec = net.step(ibr);

        for (std::size_t a = 0; a < K; ++a) {
            const auto ai = static_cast<Index>(a);
            AreaController& ctrl = controllers[a];
            if (ctrl.mode() != ControllerMode::off) {
                ctrl.estimate(rec.ibr_meas_pu(ai) - rec.tie_meas_pu(ai), rec.freq_meas_pu(ai));
            }
            request[a] = ctrl.mode() == ControllerMode::off ? 0.0 : ctrl.total_setpoint_update_MW();
            ctrl.last_total_MW = request[a];
            own[a] = allocate(request[a], ctrl.fleet());
            if (ordered_sum(own[a].changes_MW) + own[a].remainder_MW != request[a]) ++result.conservation_violations;
            result.max_remainder_MW = std::max(result.max_remainder_MW, std::abs(own[a].remainder_MW));
            support[a] = 0.0;
        }

        if (config.support.enabled) {
            for (std::size_t a = 0; a < K; ++a) {
                const double rem = own[a].remainder_MW;
                if (std::abs(rem) <= config.support.deadband_MW || neighbors[a].empty()) continue;
                const double sign = rem > 0.0 ? 1.0 : -1.0;
                std::vector<double> room;
                for (std::size_t j : neighbors[a]) {
                    const Allocation planned = allocate(request[j] + support[j], controllers[j].fleet());
                    room.push_back(residual_headroom_MW(controllers[j].fleet(), planned, sign));
                }
                const SupportSplit split = neighbor_support(rem, room);
                for (std::size_t n = 0; n < neighbors[a].size(); ++n) {
                    if (split.per_neighbor_MW[n] != 0.0) result.support_activated = true;
                    support[neighbors[a][n]] += split.per_neighbor_MW[n];
                }
            }
        }

        row[0] = rec.t;
        for (std::size_t a = 0; a < K; ++a) {
            const auto ai = static_cast<Index>(a);
            const AreaController& ctrl = controllers[a];
            final_alloc[a] = support[a] != 0.0 ? allocate(request[a] + support[a], ctrl.fleet()) : own[a];
            command[a] = final_alloc[a].changes_MW;

            const AreaColumns& c = cols[a];
            row[c.df_true] = rec.omega_pu(ai) * fn;
            row[c.df_meas] = rec.freq_meas_pu(ai) * fn;
            row[c.tie_true] = rec.tie_pu(ai) * base;
            row[c.tie_meas] = rec.tie_meas_pu(ai) * base;
            row[c.load_true] = rec.load_pu(ai) * base;
            row[c.d_hat] = ctrl.load_estimate_MW();
            row[c.y_hat] = ctrl.y_hat_pu() * fn;
            row[c.request] = request[a];
            row[c.allocated] = ordered_sum(own[a].changes_MW);
            row[c.remainder] = own[a].remainder_MW;
            row[c.support] = support[a];
            row[c.ibr_applied] = applied_MW[a];
            for (std::size_t d = 0; d < ctrl.fleet().size(); ++d) {
                row[c.first_setpoint + d] = ctrl.fleet()[d].dispatch_MW + command[a][d];
            }
        }
        tr.append_row(row);
    }

    result.metrics = compute_metrics(tr, {config.metrics.band_hz, config.metrics.window_s, last_event_time(config)});
    return result;
}

}  // namespace ddfc
