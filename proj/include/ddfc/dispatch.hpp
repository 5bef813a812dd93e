#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ddfc/error.hpp"
#include "ddfc/estimation.hpp"
#include "ddfc/grid_sim.hpp"

namespace ddfc {

struct IbrDevice {
    std::string id;
    double rating_MVA = 50.0;
    double dispatch_MW = 0.0;
    double p_min_MW = 0.0;
    double p_max_MW = 50.0;
    double participation = 1.0;
    double droop_pct = 5.0;

    double headroom_up_MW() const noexcept { return p_max_MW - dispatch_MW; }
    double headroom_down_MW() const noexcept { return dispatch_MW - p_min_MW; }

    // Throws ConfigError on violated invariants.
    void validate() const;
};

/// Total supplementary IBR change for the next step: the load estimate itself.
inline double total_setpoint_update(double d_hat_MW) noexcept { return d_hat_MW; }

/// Supplementary set-point changes per device plus the part of the request that
/// could not be placed inside device limits.
struct Allocation {
    std::vector<double> changes_MW;
    double remainder_MW = 0.0;
};

/// Participation-factor split with clamp-and-redistribute.
Allocation allocate(double total_MW, const std::vector<IbrDevice>& fleet);

/// Headroom still available in the direction of `sign` after `allocation`.
double residual_headroom_MW(const std::vector<IbrDevice>& fleet, const Allocation& allocation, double sign);

struct SupportSplit {
    std::vector<double> per_neighbor_MW;
    double unserved_MW = 0.0;
};

/// Splits a remainder over neighbours in proportion to their available
/// headroom (same direction as the remainder), capped at that headroom.
SupportSplit neighbor_support(double remainder_MW, const std::vector<double>& neighbor_headroom_MW);

enum class ControllerMode { off, data_driven, model_based };

/// One area's controller: disturbance estimator, allocator and command delay.
/// Estimates are reported with load-positive sign (MW).
class AreaController {
public:
    AreaController(std::string area_id, std::vector<IbrDevice> fleet, Index control_delay_steps, double base_MVA);

    void use_data_driven(DataDrivenEstimator estimator);
    void use_model_based(LowGainEstimator estimator);

    ControllerMode mode() const noexcept;
    const std::string& area_id() const noexcept { return area_id_; }
    const std::vector<IbrDevice>& fleet() const noexcept { return fleet_; }

    // Consumes u = ibr - tie and y = dw (pu); updates the load estimate.
    double estimate(double u_pu, double y_pu);

    // Total supplementary IBR change requested from the current estimate.
    double total_setpoint_update_MW() const noexcept { return total_setpoint_update(load_estimate_MW_); }

    double load_estimate_MW() const noexcept { return load_estimate_MW_; }
    double y_hat_pu() const noexcept { return y_hat_pu_; }
    double innovation_pu() const noexcept { return innovation_pu_; }
    bool warming_up() const noexcept;

    // Pushes a device command vector (MW changes) through the control delay.
    std::vector<double> delay_command(const std::vector<double>& changes_MW);

    double last_total_MW = 0.0;

private:
    std::string area_id_;
    std::vector<IbrDevice> fleet_;
    DelayLine control_delay_;
    double base_MVA_;
    std::variant<std::monostate, DataDrivenEstimator, LowGainEstimator> estimator_;
    double load_estimate_MW_ = 0.0;
    double y_hat_pu_ = 0.0;
    double innovation_pu_ = 0.0;
};

}  // namespace ddfc
