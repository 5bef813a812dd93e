#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ddfc/error.hpp"

namespace ddfc {

/// Column store of named time series on a shared grid. Column 0 is `t`.
class Traces {
public:
    Traces() { add_column("t"); }

    // Returns the column index; throws std::invalid_argument on duplicates.
    std::size_t add_column(const std::string& name);

    void append_row(const std::vector<double>& row);

    std::size_t rows() const noexcept { return columns_.front().size(); }
    std::size_t column_count() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<double>& column(std::size_t i) const { return columns_.at(i); }
    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const noexcept;
    const std::vector<double>& time() const noexcept { return columns_.front(); }

    bool operator==(const Traces& other) const = default;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

struct AreaMetrics {
    std::string area_id;
    double nadir_hz = 0.0;
    double settling_time_s = 0.0;
    bool settled = false;
    // Time after which |df| never leaves the band again (end of run if it
    // ends outside); stays_in_band requires at least window_s of such tail.
    double final_entry_time_s = 0.0;
    bool stays_in_band = false;
    double steady_state_error_hz = 0.0;
    double estimate_mean_MW = 0.0;
    double true_load_mean_MW = 0.0;
    double estimate_settling_error_MW = 0.0;
};

struct Metrics {
    double nadir_hz = 0.0;
    double settling_time_s = 0.0;
    bool settled = false;
    double final_entry_time_s = 0.0;
    bool stays_in_band = false;
    double steady_state_error_hz = 0.0;
    double estimate_settling_error_MW = 0.0;
    std::vector<AreaMetrics> per_area;
};

struct MetricsOptions {
    double band_hz = 0.01;
    double window_s = 1.0;
    double last_event_s = 0.0;
};

// Per-area column names used by the scenario runner and by the metrics.
namespace column {
std::string df_true(const std::string& area);
std::string df_meas(const std::string& area);
std::string tie_meas(const std::string& area);
std::string tie_true(const std::string& area);
std::string load_true(const std::string& area);
std::string d_hat(const std::string& area);
std::string y_hat(const std::string& area);
std::string request(const std::string& area);
std::string allocated(const std::string& area);
std::string remainder(const std::string& area);
std::string support(const std::string& area);
std::string ibr_applied(const std::string& area);
std::string setpoint(const std::string& area, const std::string& device);
}  // namespace column

// Areas are discovered from the `<area>.df_true_hz` columns. Estimate metrics
// are reported when the area also has `d_hat_MW` and `load_true_MW` columns.
Metrics compute_metrics(const Traces& traces, const MetricsOptions& options);

nlohmann::json to_json(const Metrics& metrics);

}  // namespace ddfc
