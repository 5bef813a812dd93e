#include "ddfc/collection.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ddfc {

Network make_network(const ScenarioConfig& config, bool with_events, const NoiseSpec& noise) {
    std::vector<AreaSpec> areas;
    for (const auto& a : config.areas) areas.push_back({a.id, a.params, a.frequency_weights});
    NetworkOptions opts;
    opts.period_s = config.period_s;
    opts.f_nominal_hz = config.f_nominal_hz;
    opts.measurement_delay_steps = config.measurement_delay_steps();
    opts.noise = noise;
    return Network(std::move(areas), config.ties, with_events ? config.events : std::vector<DisturbanceEvent>{},
                   opts);
}

Index collection_samples(const CollectionConfig& c) {
    return static_cast<Index>(std::llround(c.duration_s / c.period_s)) + 1;
}

CollectionResult run_collection(const ScenarioConfig& config, bool check_pe) {
    const CollectionConfig& col = config.collection;
    NoiseSpec noise;
    if (col.measurement_noise) {
        noise = config.noise;
        noise.seed = col.seed + 1;
    }
    Network net = make_network(config, false, noise);
    const Index K = net.area_count();
    const Index T = collection_samples(col);
    const double base = config.base_MVA;

    std::mt19937_64 rng(col.seed);
    const double sigma = std::sqrt(col.noise_psd / (2.0 * col.period_s));
    std::normal_distribution<double> white(0.0, 1.0);

    Matrix u(K, T), y(K, T), f_true(K, T);
    Vector ibr(K);
    for (Index k = 0; k < T; ++k) {
        const double t = static_cast<double>(k) * col.period_s;
        const double tone = col.amplitude_MW * std::sin(2.0 * std::numbers::pi * col.frequency_Hz * t);
        for (Index a = 0; a < K; ++a) {
            double total = 0.0;
            for (std::size_t d = 0; d < config.areas[static_cast<std::size_t>(a)].fleet.size(); ++d) {
                total += tone + sigma * white(rng);
            }
            ibr(a) = total / base;
        }
        const StepRecord rec = net.step(ibr);
        u.col(k) = rec.ibr_meas_pu - rec.tie_meas_pu;
        y.col(k) = rec.freq_meas_pu;
        f_true.col(k) = rec.omega_pu * config.f_nominal_hz;
    }

    CollectionResult out;
    out.samples = T;
    for (Index a = 0; a < K; ++a) {
        const std::string& id = config.areas[static_cast<std::size_t>(a)].id;
        TrajectoryDataset ds(Signal(u.row(a), col.period_s), Signal::zeros(1, T, col.period_s),
                             Signal(y.row(a), col.period_s), id);
        const Index order = config.controllers[static_cast<std::size_t>(a)].t_ini + 1;
        PeReport pe = is_persistently_exciting(ds.u, order);
        if (check_pe && !pe.exciting) {
            throw InfeasibleError("collection-insufficient for area '" + id + "': input not persistently exciting of order " +
                                      std::to_string(order) + " (" + pe.reason +
                                      "); use a longer duration or a higher noise_psd",
                                  pe.rank, pe.required_rank);
        }
        const double rms = std::sqrt(f_true.row(a).squaredNorm() / static_cast<double>(T));
        out.areas.push_back({id, std::move(ds), pe, rms});
    }
    return out;
}

}  // namespace ddfc
