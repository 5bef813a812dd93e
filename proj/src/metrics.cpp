#include "ddfc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddfc {

std::size_t Traces::add_column(const std::string& name) {
    if (has_column(name)) throw std::invalid_argument("duplicate trace column '" + name + "'");
    if (!columns_.empty() && !columns_.front().empty()) {
        throw std::logic_error("trace columns must be declared before rows are appended");
    }
    names_.push_back(name);
    columns_.emplace_back();
    return names_.size() - 1;
}

void Traces::append_row(const std::vector<double>& row) {
    if (row.size() != names_.size()) {
        throw std::invalid_argument("trace row has " + std::to_string(row.size()) + " values, expected " +
                                    std::to_string(names_.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) columns_[i].push_back(row[i]);
}

bool Traces::has_column(const std::string& name) const noexcept {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Traces::column(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw std::out_of_range("no trace column '" + name + "'");
    return columns_[static_cast<std::size_t>(it - names_.begin())];
}

namespace column {
std::string df_true(const std::string& a) { return a + ".df_true_hz"; }
std::string df_meas(const std::string& a) { return a + ".df_meas_hz"; }
std::string tie_meas(const std::string& a) { return a + ".tie_meas_MW"; }
std::string tie_true(const std::string& a) { return a + ".tie_true_MW"; }
std::string load_true(const std::string& a) { return a + ".load_true_MW"; }
std::string d_hat(const std::string& a) { return a + ".d_hat_MW"; }
std::string y_hat(const std::string& a) { return a + ".y_hat_hz"; }
std::string request(const std::string& a) { return a + ".request_MW"; }
std::string allocated(const std::string& a) { return a + ".allocated_MW"; }
std::string remainder(const std::string& a) { return a + ".remainder_MW"; }
std::string support(const std::string& a) { return a + ".support_MW"; }
std::string ibr_applied(const std::string& a) { return a + ".ibr_applied_MW"; }
std::string setpoint(const std::string& a, const std::string& d) { return a + "." + d + ".setpoint_MW"; }
}  // namespace column

namespace {

double tail_mean(const std::vector<double>& v, std::size_t first) {
    double s = 0.0;
    for (std::size_t k = first; k < v.size(); ++k) s += v[k];
    return s / static_cast<double>(v.size() - first);
}

}  // namespace

Metrics compute_metrics(const Traces& traces, const MetricsOptions& options) {
    if (!(options.band_hz > 0.0)) throw std::invalid_argument("compute_metrics: band must be positive");
    if (options.window_s < 0.0) throw std::invalid_argument("compute_metrics: window must be non-negative");
    if (traces.rows() == 0) throw std::invalid_argument("compute_metrics: traces are empty");

    const std::string suffix = ".df_true_hz";
    std::vector<std::string> areas;
    for (const auto& name : traces.names()) {
        if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            areas.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    if (areas.empty()) throw std::invalid_argument("compute_metrics: no frequency columns");

    const auto& t = traces.time();
    const std::size_t n = t.size();
    const double t_end = t.back();
    // Final 10% of the run, at least one sample.
    const std::size_t tail = std::min(n - 1, static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n))));
    constexpr double slack = 1e-9;

    Metrics out;
    out.settled = true;
    out.stays_in_band = true;
    out.settling_time_s = options.last_event_s;
    out.final_entry_time_s = options.last_event_s;
    for (const auto& area : areas) {
        const auto& f = traces.column(column::df_true(area));
        AreaMetrics m;
        m.area_id = area;
        m.nadir_hz = std::min(0.0, *std::min_element(f.begin(), f.end()));

        std::size_t start = 0;
        while (start < n && t[start] + slack < options.last_event_s) ++start;

        // Earliest sample from which |df| stays in band for window_s.
        m.settled = false;
        m.settling_time_s = t_end;
        std::size_t k = start;
        while (k < n) {
            std::size_t j = k;
            bool ok = true;
            while (j < n && t[j] <= t[k] + options.window_s + slack) {
                if (std::abs(f[j]) > options.band_hz) {
                    ok = false;
                    break;
                }
                ++j;
            }
            if (ok) {
                m.settled = true;
                m.settling_time_s = std::max(t[k], options.last_event_s);
                break;
            }
            k = j + 1;
        }
        std::size_t last_out = n;
        for (std::size_t j = start; j < n; ++j) {
            if (std::abs(f[j]) > options.band_hz) last_out = j;
        }
        if (last_out == n) {
            m.final_entry_time_s = start < n ? std::max(t[start], options.last_event_s) : t_end;
        } else {
            m.final_entry_time_s = last_out + 1 < n ? t[last_out + 1] : t_end;
        }
        m.stays_in_band = m.settled && (last_out == n || last_out + 1 < n) &&
                          t_end - m.final_entry_time_s + slack >= options.window_s;
        m.steady_state_error_hz = std::abs(tail_mean(f, tail));

        if (traces.has_column(column::d_hat(area)) && traces.has_column(column::load_true(area))) {
            m.estimate_mean_MW = tail_mean(traces.column(column::d_hat(area)), tail);
            m.true_load_mean_MW = tail_mean(traces.column(column::load_true(area)), tail);
            m.estimate_settling_error_MW = std::abs(m.estimate_mean_MW - m.true_load_mean_MW);
        }

        out.nadir_hz = std::min(out.nadir_hz, m.nadir_hz);
        out.settling_time_s = std::max(out.settling_time_s, m.settling_time_s);
        out.final_entry_time_s = std::max(out.final_entry_time_s, m.final_entry_time_s);
        out.settled = out.settled && m.settled;
        out.stays_in_band = out.stays_in_band && m.stays_in_band;
        out.steady_state_error_hz = std::max(out.steady_state_error_hz, m.steady_state_error_hz);
        out.estimate_settling_error_MW = std::max(out.estimate_settling_error_MW, m.estimate_settling_error_MW);
        out.per_area.push_back(std::move(m));
    }
    return out;
}

nlohmann::json to_json(const Metrics& m) {
    nlohmann::json j;
    j["nadir_hz"] = m.nadir_hz;
    j["settling_time_s"] = m.settling_time_s;
    j["settled"] = m.settled;
    j["final_entry_time_s"] = m.final_entry_time_s;
    j["stays_in_band"] = m.stays_in_band;
    j["steady_state_error_hz"] = m.steady_state_error_hz;
    j["estimate_settling_error_MW"] = m.estimate_settling_error_MW;
    j["per_area"] = nlohmann::json::array();
    for (const auto& a : m.per_area) {
        j["per_area"].push_back({{"area", a.area_id},
                                 {"nadir_hz", a.nadir_hz},
                                 {"settling_time_s", a.settling_time_s},
                                 {"settled", a.settled},
                                 {"final_entry_time_s", a.final_entry_time_s},
                                 {"stays_in_band", a.stays_in_band},
                                 {"steady_state_error_hz", a.steady_state_error_hz},
                                 {"estimate_mean_MW", a.estimate_mean_MW},
                                 {"true_load_mean_MW", a.true_load_mean_MW},
                                 {"estimate_settling_error_MW", a.estimate_settling_error_MW}});
    }
    return j;
}

}  // namespace ddfc
