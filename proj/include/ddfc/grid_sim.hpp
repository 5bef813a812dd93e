#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ddfc/error.hpp"
#include "ddfc/estimation.hpp"

namespace ddfc {

/// Lumped frequency dynamics of one control area, all on the system base.
struct LcaParams {
    double H = 5.0;     // inertia constant [s]
    double R_I = 0.05;  // aggregate IBR droop [pu]
    double R_g = 0.05;  // aggregate governor droop [pu]
    double T_R = 8.0;   // reheat time constant [s]
    double F_H = 0.3;   // high-pressure turbine fraction
    std::vector<double> extra_lags;  // first-order actuator lags on the IBR channel [s]
    double S_base_MVA = 100.0;

    // Throws ConfigError on violated invariants.
    void validate() const;
};

/// Continuous-time realization with states [dw, dPm, lag_1 .. lag_k] and
/// input columns [ibr, load, tie].
struct ContinuousArea {
    Matrix A;
    Vector b_ibr;
    Vector b_load;
    Vector b_tie;
};

ContinuousArea area_realization(const LcaParams& params);

/// Zero-order-hold discretization of (Ac, Bc).
std::pair<Matrix, Matrix> zoh_discretize(const Matrix& Ac, const Matrix& Bc, double period_s);

/// Per-area deviation model: inputs (ibr, tie), disturbance = load, output dw [pu].
LtiModel discretize(const LcaParams& params, double period_s);

/// Single-channel estimator model: u = ibr - tie, d enters the same channel
/// (B_d = B) with injection sign, output dw [pu].
LtiModel lumped_area_model(const LcaParams& params, double period_s);

/// Steady-state dw per unit load: -1 / (1/R_I + 1/R_g).
double droop_dc_gain(const LcaParams& params);

/// Fixed integer delay. Output at step t is the input pushed at step t - delay.
class DelayLine {
public:
    DelayLine(Index delay_steps, Index width);

    Vector push(const Vector& input);

    Index delay_steps() const noexcept { return delay_steps_; }

private:
    Index delay_steps_;
    std::deque<Vector> buffer_;
};

struct TieLine {
    std::string area_a;
    std::string area_b;
    double T_ab = 0.5;  // synchronizing coefficient [pu / rad]
};

enum class EventKind { step_load, ramp, generator_trip };

struct DisturbanceEvent {
    EventKind kind = EventKind::step_load;
    std::string area;
    std::string bus_label;
    double start_s = 0.0;
    double magnitude_MW = 0.0;  // positive = load increase / lost generation
    double ramp_rate_MW_per_s = 0.0;
    std::optional<LcaParams> param_switch;
    std::string unit;  // tripped unit id, informational
};

// Load deviation contributed by an event at time t [MW].
double event_load_MW(const DisturbanceEvent& event, double t);

struct TripEffect {
    LcaParams params;
    double step_MW = 0.0;
};

TripEffect apply_generator_trip(const LcaParams& current, const DisturbanceEvent& event);

struct NoiseSpec {
    double freq_std_pu = 0.0;
    double tie_std_pu = 0.0;
    std::uint64_t seed = 0;
};

struct AreaSpec {
    std::string id;
    LcaParams params;
    // Frequency measurement as a weighted average of area frequencies;
    // empty means the area's own frequency.
    std::vector<std::pair<std::string, double>> frequency_weights;
};

struct NetworkOptions {
    double period_s = 0.1;
    double f_nominal_hz = 60.0;
    Index measurement_delay_steps = 0;
    NoiseSpec noise;
};

struct StepRecord {
    double t = 0.0;
    Vector omega_pu;     // true per-area frequency deviation
    Vector tie_pu;       // true net tie export per area
    Vector load_pu;      // true unmeasured load deviation per area
    Vector ibr_pu;       // applied supplementary IBR injection per area
    Vector freq_meas_pu;
    Vector tie_meas_pu;
    Vector ibr_meas_pu;
};

/// Interconnected truth plant. States: per-area realizations followed by the
/// angles of areas 1..K-1 relative to area 0.
class Network {
public:
    Network(std::vector<AreaSpec> areas, std::vector<TieLine> ties, std::vector<DisturbanceEvent> events,
            NetworkOptions options);

    Index area_count() const noexcept { return static_cast<Index>(areas_.size()); }
    Index area_index(const std::string& id) const;
    const std::vector<AreaSpec>& areas() const noexcept { return areas_; }
    const NetworkOptions& options() const noexcept { return options_; }

    // Records truth and measurements at the current step, then advances the
    // plant with `ibr_applied_pu` held over the step.
    StepRecord step(const Vector& ibr_applied_pu);

    Index step_index() const noexcept { return k_; }
    double time() const noexcept { return static_cast<double>(k_) * options_.period_s; }
    const Vector& state() const noexcept { return x_; }
    Vector omega() const;
    Vector tie_flows() const;

    double coupled_spectral_radius() const { return spectral_radius(Ad_); }

    // |2H dw/dt - (power terms)| per area, for the given state and inputs.
    Vector swing_residuals(const Vector& ibr_pu, const Vector& load_pu) const;

    // Continuous-time dynamics of the coupled system (for checks).
    const Matrix& continuous_A() const noexcept { return Ac_; }
    const Matrix& continuous_B() const noexcept { return Bc_; }

private:
    void rebuild();
    Vector loads_pu(double t) const;

    std::vector<AreaSpec> areas_;
    std::vector<TieLine> ties_;
    std::vector<DisturbanceEvent> events_;
    std::vector<bool> trip_applied_;
    NetworkOptions options_;

    std::vector<Index> offsets_;  // first state of each area
    std::vector<Index> sizes_;
    Index angle_offset_ = 0;
    Matrix tie_map_;   // K x n, tie export as a function of state
    Matrix omega_map_; // K x n
    Matrix freq_meas_map_;
    Matrix Ac_, Bc_, Ad_, Bd_;

    Vector x_;
    Index k_ = 0;
    DelayLine freq_delay_, tie_delay_, ibr_delay_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ddfc
