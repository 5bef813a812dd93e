#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddfc/metrics.hpp"
#include "ddfc/scenario.hpp"

namespace ddfc {

struct ExportFormats {
    bool csv = true;
    bool svg = true;
};

// Parses "csv", "svg", "csv,svg" or "all"; throws ConfigError otherwise.
ExportFormats parse_formats(const std::string& text);

// Writes traces.csv (lossless numbers), result.json (always with a metrics
// block) and the requested SVG charts into `dir`. Returns the written files.
std::vector<std::filesystem::path> export_result(const RunResult& result, const std::filesystem::path& dir,
                                                 const ExportFormats& formats);

void write_traces_csv(const Traces& traces, const std::filesystem::path& path);
Traces read_traces_csv(const std::filesystem::path& path);

nlohmann::json result_json(const RunResult& result);

struct ChartSeries {
    std::string label;
    std::vector<double> values;
};

// Line chart with one polyline per series.
std::string svg_line_chart(const std::string& title, const std::string& y_label, const std::vector<double>& t,
                           const std::vector<ChartSeries>& series);

struct MetricDelta {
    std::string key;
    double a = 0.0;
    double b = 0.0;
};

/// Numeric metric differences between two run directories (b - a).
std::vector<MetricDelta> compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace ddfc
