#include "ddfc/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace ddfc {

void IbrDevice::validate() const {
    auto fail = [this](const std::string& what) { throw ConfigError("IBR '" + id + "': " + what); };
    if (!(rating_MVA > 0.0)) fail("rating must be positive");
    if (!(p_min_MW <= dispatch_MW && dispatch_MW <= p_max_MW)) fail("dispatch must lie within [p_min, p_max]");
    if (!(participation >= 0.0) || !std::isfinite(participation)) fail("participation must be non-negative");
    if (!(droop_pct > 0.0)) fail("droop must be positive");
}

Allocation allocate(double total_MW, const std::vector<IbrDevice>& fleet) {
    if (fleet.empty()) throw ConfigError("allocate: fleet is empty");
    const bool any_weight = std::any_of(fleet.begin(), fleet.end(), [](const IbrDevice& d) { return d.participation > 0.0; });
    if (!any_weight) throw ConfigError("allocate: all participation factors are zero");
    if (!std::isfinite(total_MW)) throw std::invalid_argument("allocate: non-finite request");

    const std::size_t n = fleet.size();
    Allocation out;
    out.changes_MW.assign(n, 0.0);
    if (total_MW == 0.0) return out;

    const double sign = total_MW > 0.0 ? 1.0 : -1.0;
    const double request = std::abs(total_MW);
    std::vector<double> cap(n), placed(n, 0.0);
    std::vector<bool> active(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        cap[i] = std::max(0.0, sign > 0.0 ? fleet[i].headroom_up_MW() : fleet[i].headroom_down_MW());
        active[i] = fleet[i].participation > 0.0 && cap[i] > 0.0;
    }

    // Waterfall: clamp every device whose proportional share would exceed its
    // cap, then re-split what is left over the unsaturated set.
    double clamped_total = 0.0;
    for (std::size_t iter = 0; iter <= n; ++iter) {
        double weight = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) weight += fleet[i].participation;
        }
        const double remaining = request - clamped_total;
        if (weight <= 0.0 || remaining <= 0.0) break;

        bool clamped = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i] && remaining * fleet[i].participation / weight >= cap[i]) {
                placed[i] = cap[i];
                clamped_total += cap[i];
                active[i] = false;
                clamped = true;
            }
        }
        if (!clamped) {
            for (std::size_t i = 0; i < n; ++i) {
                if (active[i]) placed[i] = remaining * fleet[i].participation / weight;
            }
            break;
        }
    }

    // Shares are floored to the resolution of the request (its unit in the last
    // place). Every partial sum is then exact, so summing the changes left to
    // right and adding the remainder reproduces the request bit for bit.
    const int k = std::max(std::ilogb(request) - std::numeric_limits<double>::digits + 1,
                           std::numeric_limits<double>::min_exponent - std::numeric_limits<double>::digits);
    const auto budget = static_cast<std::int64_t>(std::ldexp(request, -k));
    std::vector<std::int64_t> units(n);
    std::int64_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        units[i] = static_cast<std::int64_t>(std::floor(std::ldexp(placed[i], -k)));
        used += units[i];
    }
    for (; used > budget; --used) --*std::max_element(units.begin(), units.end());
    for (std::size_t i = 0; i < n; ++i) placed[i] = std::ldexp(static_cast<double>(units[i]), k);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.changes_MW[i] = sign * placed[i];
        sum += out.changes_MW[i];
    }
    out.remainder_MW = total_MW - sum;
    return out;
}

double residual_headroom_MW(const std::vector<IbrDevice>& fleet, const Allocation& allocation, double sign) {
    double total = 0.0;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const double change = i < allocation.changes_MW.size() ? allocation.changes_MW[i] : 0.0;
        if (fleet[i].participation <= 0.0) continue;
        const double room = sign >= 0.0 ? fleet[i].headroom_up_MW() - change : fleet[i].headroom_down_MW() + change;
        total += std::max(0.0, room);
    }
    return total;
}

SupportSplit neighbor_support(double remainder_MW, const std::vector<double>& neighbor_headroom_MW) {
    SupportSplit out;
    out.per_neighbor_MW.assign(neighbor_headroom_MW.size(), 0.0);
    if (remainder_MW == 0.0) return out;
    const double need = std::abs(remainder_MW);
    const double sign = remainder_MW > 0.0 ? 1.0 : -1.0;
    double total = 0.0;
    for (double h : neighbor_headroom_MW) total += std::max(0.0, h);
    if (total <= 0.0) {
        out.unserved_MW = remainder_MW;
        return out;
    }
    const double served = std::min(need, total);
    double given = 0.0;
    for (std::size_t i = 0; i < neighbor_headroom_MW.size(); ++i) {
        const double h = std::max(0.0, neighbor_headroom_MW[i]);
        out.per_neighbor_MW[i] = sign * std::min(h, served * h / total);
        given += out.per_neighbor_MW[i];
    }
    out.unserved_MW = remainder_MW - given;
    return out;
}

AreaController::AreaController(std::string area_id, std::vector<IbrDevice> fleet, Index control_delay_steps,
                               double base_MVA)
    : area_id_(std::move(area_id)),
      fleet_(std::move(fleet)),
      control_delay_(control_delay_steps, static_cast<Index>(fleet_.size())),
      base_MVA_(base_MVA) {
    for (const auto& d : fleet_) d.validate();
}

void AreaController::use_data_driven(DataDrivenEstimator estimator) {
    const auto& lay = estimator.layout();
    if (lay.m != 1 || lay.q != 1 || lay.p != 1) {
        throw ConfigError("area '" + area_id_ + "': data-driven estimator must be single-channel");
    }
    estimator_ = std::move(estimator);
}

void AreaController::use_model_based(LowGainEstimator estimator) { estimator_ = std::move(estimator); }

ControllerMode AreaController::mode() const noexcept {
    if (std::holds_alternative<DataDrivenEstimator>(estimator_)) return ControllerMode::data_driven;
    if (std::holds_alternative<LowGainEstimator>(estimator_)) return ControllerMode::model_based;
    return ControllerMode::off;
}

bool AreaController::warming_up() const noexcept {
    if (const auto* dd = std::get_if<DataDrivenEstimator>(&estimator_)) return dd->warming_up();
    return false;
}

double AreaController::estimate(double u_pu, double y_pu) {
    const Vector u = Vector::Constant(1, u_pu);
    const Vector y = Vector::Constant(1, y_pu);
    auto run = [&](auto& est) {
        // The estimator's disturbance shares the injection channel; a load is a
        // negative injection.
        const Vector& d = est.step(u, y);
        load_estimate_MW_ = -d(0) * base_MVA_;
        y_hat_pu_ = est.y_hat()(0);
        innovation_pu_ = est.innovation()(0);
    };
    if (auto* dd = std::get_if<DataDrivenEstimator>(&estimator_)) {
        run(*dd);
    } else if (auto* mb = std::get_if<LowGainEstimator>(&estimator_)) {
        run(*mb);
    }
    return load_estimate_MW_;
}

std::vector<double> AreaController::delay_command(const std::vector<double>& changes_MW) {
    Vector v = Eigen::Map<const Vector>(changes_MW.data(), static_cast<Index>(changes_MW.size()));
    const Vector out = control_delay_.push(v);
    return std::vector<double>(out.data(), out.data() + out.size());
}

}  // namespace ddfc
