#include "ddfc/grid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace ddfc {

namespace {

constexpr double kEventTimeSlack = 1e-9;

}  // namespace

void LcaParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("LcaParams: " + what); };
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(H > 0.0) || !finite(H)) fail("H must be positive");
    if (!(T_R > 0.0) || !finite(T_R)) fail("T_R must be positive");
    if (!(R_I > 0.0) || !finite(R_I)) fail("R_I must be positive");
    if (!(R_g > 0.0) || !finite(R_g)) fail("R_g must be positive");
    if (!(F_H >= 0.0 && F_H <= 1.0)) fail("F_H must lie in [0, 1]");
    if (!(S_base_MVA > 0.0)) fail("S_base_MVA must be positive");
    for (double tau : extra_lags) {
        if (!(tau > 0.0) || !finite(tau)) fail("extra lag time constants must be positive");
    }
}

ContinuousArea area_realization(const LcaParams& params) {
    params.validate();
    const Index lags = static_cast<Index>(params.extra_lags.size());
    const Index n = 2 + lags;
    constexpr Index w = 0;
    constexpr Index pm = 1;

    ContinuousArea out;
    out.A = Matrix::Zero(n, n);
    out.b_ibr = Vector::Zero(n);
    out.b_load = Vector::Zero(n);
    out.b_tie = Vector::Zero(n);

    // Swing row: 2H dw = -dw/R_I + dPm - dPu - dPtie + P_eff.
    const double k = 1.0 / (2.0 * params.H);
    out.A(w, w) = -k / params.R_I;
    out.A(w, pm) = k;
    out.b_load(w) = -k;
    out.b_tie(w) = -k;
    if (lags == 0) {
        out.b_ibr(w) = k;
    } else {
        out.A(w, 1 + lags) = k;
        for (Index i = 0; i < lags; ++i) {
            const double tau = params.extra_lags[static_cast<std::size_t>(i)];
            const Index s = 2 + i;
            out.A(s, s) = -1.0 / tau;
            if (i == 0) {
                out.b_ibr(s) = 1.0 / tau;
            } else {
                out.A(s, s - 1) = 1.0 / tau;
            }
        }
    }

    // Governor row: T_R dPm = -dPm - (dw + T_R F_H dw_dot) / R_g.
    const double g = 1.0 / (params.T_R * params.R_g);
    const double fh = params.T_R * params.F_H;
    out.A.row(pm) = -g * fh * out.A.row(w);
    out.A(pm, pm) += -1.0 / params.T_R;
    out.A(pm, w) += -g;
    out.b_ibr(pm) = -g * fh * out.b_ibr(w);
    out.b_load(pm) = -g * fh * out.b_load(w);
    out.b_tie(pm) = -g * fh * out.b_tie(w);
    return out;
}

std::pair<Matrix, Matrix> zoh_discretize(const Matrix& Ac, const Matrix& Bc, double period_s) {
    const Index n = Ac.rows();
    const Index m = Bc.cols();
    if (!Ac.allFinite() || !Bc.allFinite() || !std::isfinite(period_s)) {
        throw std::invalid_argument("zoh_discretize: non-finite input");
    }
    Matrix block = Matrix::Zero(n + m, n + m);
    block.topLeftCorner(n, n) = Ac * period_s;
    block.topRightCorner(n, m) = Bc * period_s;
    const Matrix e = block.exp();
    if (!e.allFinite()) {
        throw std::invalid_argument("zoh_discretize: matrix exponential overflowed");
    }
    return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

namespace {

void check_period(const LcaParams& params, double period_s) {
    if (!(period_s > 0.0) || !(period_s < params.T_R)) {
        throw std::invalid_argument("discretize: period must lie in (0, T_R), got " + std::to_string(period_s));
    }
}

}  // namespace

LtiModel discretize(const LcaParams& params, double period_s) {
    check_period(params, period_s);
    const auto area = area_realization(params);
    const Index n = area.A.rows();
    Matrix Bc(n, 3);
    Bc << area.b_ibr, area.b_tie, area.b_load;
    auto [Ad, Bd] = zoh_discretize(area.A, Bc, period_s);
    Matrix C = Matrix::Zero(1, n);
    C(0, 0) = 1.0;
    return LtiModel(Ad, Bd.leftCols(2), Bd.rightCols(1), C, Matrix::Zero(1, 2), period_s);
}

LtiModel lumped_area_model(const LcaParams& params, double period_s) {
    check_period(params, period_s);
    const auto area = area_realization(params);
    const Index n = area.A.rows();
    // The direct swing-equation injection channel (-b_tie); identical to the
    // IBR channel when no actuator lags are modelled.
    const Matrix b = -area.b_tie;
    auto [Ad, Bd] = zoh_discretize(area.A, b, period_s);
    Matrix C = Matrix::Zero(1, n);
    C(0, 0) = 1.0;
    return LtiModel(Ad, Bd, Bd, C, Matrix::Zero(1, 1), period_s);
}

double droop_dc_gain(const LcaParams& params) {
    return -1.0 / (1.0 / params.R_I + 1.0 / params.R_g);
}

DelayLine::DelayLine(Index delay_steps, Index width) : delay_steps_(delay_steps) {
    if (delay_steps < 0) throw std::invalid_argument("delay must be non-negative");
    for (Index i = 0; i < delay_steps; ++i) buffer_.push_back(Vector::Zero(width));
}

Vector DelayLine::push(const Vector& input) {
    if (delay_steps_ == 0) return input;
    buffer_.push_back(input);
    Vector out = std::move(buffer_.front());
    buffer_.pop_front();
    return out;
}

double event_load_MW(const DisturbanceEvent& event, double t) {
    if (t + kEventTimeSlack < event.start_s) return 0.0;
    switch (event.kind) {
        case EventKind::step_load:
        case EventKind::generator_trip:
            return event.magnitude_MW;
        case EventKind::ramp: {
            const double ramped = std::abs(event.ramp_rate_MW_per_s) * std::max(0.0, t - event.start_s);
            return std::copysign(std::min(ramped, std::abs(event.magnitude_MW)), event.magnitude_MW);
        }
    }
    return 0.0;
}

TripEffect apply_generator_trip(const LcaParams& current, const DisturbanceEvent& event) {
    if (event.kind != EventKind::generator_trip) {
        throw std::invalid_argument("apply_generator_trip: event is not a generator trip");
    }
    TripEffect out{event.param_switch.value_or(current), event.magnitude_MW};
    out.params.validate();
    return out;
}

Network::Network(std::vector<AreaSpec> areas, std::vector<TieLine> ties, std::vector<DisturbanceEvent> events,
                 NetworkOptions options)
    : areas_(std::move(areas)),
      ties_(std::move(ties)),
      events_(std::move(events)),
      options_(options),
      freq_delay_(options.measurement_delay_steps, static_cast<Index>(areas_.size())),
      tie_delay_(options.measurement_delay_steps, static_cast<Index>(areas_.size())),
      ibr_delay_(options.measurement_delay_steps, static_cast<Index>(areas_.size())),
      rng_(options.noise.seed) {
    if (areas_.empty()) throw ConfigError("network needs at least one area");
    if (!(options_.period_s > 0.0)) throw ConfigError("network period must be positive");
    if (options_.noise.freq_std_pu < 0.0 || options_.noise.tie_std_pu < 0.0) {
        throw ConfigError("noise standard deviations must be non-negative");
    }
    for (std::size_t i = 0; i < areas_.size(); ++i) {
        areas_[i].params.validate();
        for (std::size_t j = 0; j < i; ++j) {
            if (areas_[i].id == areas_[j].id) throw ConfigError("duplicate area id '" + areas_[i].id + "'");
        }
    }
    for (const auto& tie : ties_) {
        area_index(tie.area_a);
        area_index(tie.area_b);
        if (tie.area_a == tie.area_b) throw ConfigError("tie line connects area '" + tie.area_a + "' to itself");
        if (!(tie.T_ab > 0.0)) throw ConfigError("tie line synchronizing coefficient must be positive");
    }
    for (const auto& ev : events_) {
        area_index(ev.area);
        if (ev.start_s < 0.0 || !std::isfinite(ev.magnitude_MW)) {
            throw ConfigError("event in area '" + ev.area + "' has negative start time or non-finite magnitude");
        }
        if (ev.param_switch) ev.param_switch->validate();
    }
    trip_applied_.assign(events_.size(), false);

    Index n = 0;
    for (const auto& a : areas_) {
        offsets_.push_back(n);
        const Index s = 2 + static_cast<Index>(a.params.extra_lags.size());
        sizes_.push_back(s);
        n += s;
    }
    angle_offset_ = n;
    n += area_count() - 1;
    x_ = Vector::Zero(n);

    const Index K = area_count();
    omega_map_ = Matrix::Zero(K, n);
    for (Index i = 0; i < K; ++i) omega_map_(i, offsets_[static_cast<std::size_t>(i)]) = 1.0;
    tie_map_ = Matrix::Zero(K, n);
    auto angle_col = [&](Index area) { return area == 0 ? Index{-1} : angle_offset_ + area - 1; };
    for (const auto& tie : ties_) {
        const Index a = area_index(tie.area_a);
        const Index b = area_index(tie.area_b);
        // Export a -> b = T (delta_a - delta_b); antisymmetric by construction.
        for (auto [row, sign] : {std::pair{a, 1.0}, std::pair{b, -1.0}}) {
            if (const Index ca = angle_col(a); ca >= 0) tie_map_(row, ca) += sign * tie.T_ab;
            if (const Index cb = angle_col(b); cb >= 0) tie_map_(row, cb) -= sign * tie.T_ab;
        }
    }
    freq_meas_map_ = Matrix::Zero(K, K);
    for (Index i = 0; i < K; ++i) {
        const auto& weights = areas_[static_cast<std::size_t>(i)].frequency_weights;
        if (weights.empty()) {
            freq_meas_map_(i, i) = 1.0;
            continue;
        }
        double total = 0.0;
        for (const auto& [id, wgt] : weights) {
            if (wgt < 0.0) throw ConfigError("frequency measurement weights must be non-negative");
            freq_meas_map_(i, area_index(id)) += wgt;
            total += wgt;
        }
        if (!(total > 0.0)) throw ConfigError("frequency measurement weights sum to zero");
        freq_meas_map_.row(i) /= total;
    }
    rebuild();
    const double rho = coupled_spectral_radius();
    if (!(rho < 1.0)) {
        throw ConfigError("interconnected system is not stable (spectral radius " + std::to_string(rho) + ")");
    }
}

Index Network::area_index(const std::string& id) const {
    for (std::size_t i = 0; i < areas_.size(); ++i) {
        if (areas_[i].id == id) return static_cast<Index>(i);
    }
    throw ConfigError("unknown area '" + id + "'");
}

void Network::rebuild() {
    const Index K = area_count();
    const Index n = x_.size();
    Ac_ = Matrix::Zero(n, n);
    Bc_ = Matrix::Zero(n, 2 * K);  // columns [ibr_0 .. ibr_{K-1}, load_0 .. load_{K-1}]
    const double omega_base = 2.0 * std::numbers::pi * options_.f_nominal_hz;
    for (Index i = 0; i < K; ++i) {
        const auto area = area_realization(areas_[static_cast<std::size_t>(i)].params);
        const Index o = offsets_[static_cast<std::size_t>(i)];
        const Index s = sizes_[static_cast<std::size_t>(i)];
        Ac_.block(o, o, s, s) = area.A;
        Ac_.middleRows(o, s) += area.b_tie * tie_map_.row(i);
        Bc_.block(o, i, s, 1) = area.b_ibr;
        Bc_.block(o, K + i, s, 1) = area.b_load;
        if (i > 0) {
            Ac_(angle_offset_ + i - 1, o) += omega_base;
            Ac_(angle_offset_ + i - 1, offsets_[0]) -= omega_base;
        }
    }
    std::tie(Ad_, Bd_) = zoh_discretize(Ac_, Bc_, options_.period_s);
}

Vector Network::omega() const { return omega_map_ * x_; }

Vector Network::tie_flows() const { return tie_map_ * x_; }

Vector Network::loads_pu(double t) const {
    Vector load = Vector::Zero(area_count());
    for (const auto& ev : events_) {
        const Index a = area_index(ev.area);
        const double base = areas_[static_cast<std::size_t>(a)].params.S_base_MVA;
        load(a) += event_load_MW(ev, t) / base;
    }
    return load;
}

StepRecord Network::step(const Vector& ibr_applied_pu) {
    const Index K = area_count();
    if (ibr_applied_pu.size() != K) {
        throw std::invalid_argument("Network::step expects one IBR injection per area");
    }
    const double t = time();

    bool switched = false;
    for (std::size_t e = 0; e < events_.size(); ++e) {
        const auto& ev = events_[e];
        if (ev.kind != EventKind::generator_trip || trip_applied_[e]) continue;
        if (t + kEventTimeSlack >= ev.start_s) {
            auto& params = areas_[static_cast<std::size_t>(area_index(ev.area))].params;
            params = apply_generator_trip(params, ev).params;
            trip_applied_[e] = true;
            switched = true;
        }
    }
    if (switched) rebuild();

    StepRecord rec;
    rec.t = t;
    rec.omega_pu = omega();
    rec.tie_pu = tie_flows();
    rec.load_pu = loads_pu(t);
    rec.ibr_pu = ibr_applied_pu;

    Vector freq_noise(K), tie_noise(K);
    for (Index i = 0; i < K; ++i) {
        freq_noise(i) = options_.noise.freq_std_pu * normal_(rng_);
        tie_noise(i) = options_.noise.tie_std_pu * normal_(rng_);
    }
    rec.freq_meas_pu = freq_delay_.push(freq_meas_map_ * rec.omega_pu) + freq_noise;
    rec.tie_meas_pu = tie_delay_.push(rec.tie_pu) + tie_noise;
    rec.ibr_meas_pu = ibr_delay_.push(ibr_applied_pu);

    Vector u(2 * K);
    u << ibr_applied_pu, rec.load_pu;
    x_ = Ad_ * x_ + Bd_ * u;
    ++k_;
    return rec;
}

Vector Network::swing_residuals(const Vector& ibr_pu, const Vector& load_pu) const {
    const Index K = area_count();
    Vector u(2 * K);
    u << ibr_pu, load_pu;
    const Vector xdot = Ac_ * x_ + Bc_ * u;
    const Vector tie = tie_flows();
    Vector out(K);
    for (Index i = 0; i < K; ++i) {
        const auto& p = areas_[static_cast<std::size_t>(i)].params;
        const Index o = offsets_[static_cast<std::size_t>(i)];
        const Index s = sizes_[static_cast<std::size_t>(i)];
        const double eff = p.extra_lags.empty() ? ibr_pu(i) : x_(o + s - 1);
        const double power = -x_(o) / p.R_I + x_(o + 1) - load_pu(i) - tie(i) + eff;
        out(i) = std::abs(2.0 * p.H * xdot(o) - power);
    }
    return out;
}

}  // namespace ddfc
