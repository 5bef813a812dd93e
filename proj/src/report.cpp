#include "ddfc/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ddfc/csv.hpp"

namespace ddfc {

namespace fs = std::filesystem;

ExportFormats parse_formats(const std::string& text) {
    ExportFormats f{false, false};
    for (const auto& part : csv::split(text, ',')) {
        if (part == "csv") f.csv = true;
        else if (part == "svg") f.svg = true;
        else if (part == "all") f.csv = f.svg = true;
        else throw ConfigError("unknown output format '" + part + "' (expected csv, svg or all)");
    }
    if (!f.csv && !f.svg) throw ConfigError("no output format selected");
    return f;
}

void write_traces_csv(const Traces& traces, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write traces", path.string());
    const auto& names = traces.names();
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << '\n';
    for (std::size_t r = 0; r < traces.rows(); ++r) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (c) out << ',';
            out << csv::format_lossless(traces.column(c)[r]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed", path.string());
}

Traces read_traces_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open traces", path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty traces file", path.string());
    const auto names = csv::split(line, ',');
    if (names.empty() || names.front() != "t") throw IoError("traces header must start with 't'", path.string());
    Traces tr;
    for (std::size_t c = 1; c < names.size(); ++c) tr.add_column(names[c]);
    std::vector<double> row(names.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = csv::split(line, ',');
        if (cells.size() != names.size()) {
            throw IoError("row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " cells", path.string());
        }
        try {
            for (std::size_t c = 0; c < cells.size(); ++c) row[c] = csv::parse_double(cells[c]);
        } catch (const std::exception& e) {
            throw IoError(std::string("bad number on row ") + std::to_string(lineno) + " (" + e.what() + ")",
                          path.string());
        }
        tr.append_row(row);
    }
    return tr;
}

nlohmann::json result_json(const RunResult& r) {
    nlohmann::json j;
    j["version"] = r.version;
    j["seed"] = r.seed;
    j["metrics"] = to_json(r.metrics);
    j["allocation"] = {{"conservation_violations", r.conservation_violations},
                       {"support_activated", r.support_activated},
                       {"max_remainder_MW", r.max_remainder_MW}};
    j["warnings"] = r.warnings;
    j["rows"] = r.traces.rows();
    j["columns"] = r.traces.names();
    j["config"] = r.config_echo;
    return j;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write", path.string());
    out << text;
    if (!out) throw IoError("write failed", path.string());
}

std::vector<std::string> area_ids(const Traces& tr) {
    const std::string suffix = ".df_true_hz";
    std::vector<std::string> ids;
    for (const auto& n : tr.names()) {
        if (n.size() > suffix.size() && n.ends_with(suffix)) ids.push_back(n.substr(0, n.size() - suffix.size()));
    }
    return ids;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& y_label, const std::vector<double>& t,
                           const std::vector<ChartSeries>& series) {
    constexpr double W = 800, H = 400, left = 70, right = 170, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    double t0 = t.empty() ? 0.0 : t.front();
    double t1 = t.empty() ? 1.0 : t.back();
    if (!(t1 > t0)) t1 = t0 + 1.0;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : series) {
        for (double v : s.values) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) lo = -1.0, hi = 1.0;
    if (!(hi > lo)) {
        const double pad = std::max(1e-9, std::abs(hi) * 0.05);
        lo -= pad;
        hi += pad;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
    auto sx = [&](double x) { return left + (x - t0) / (t1 - t0) * pw; };
    auto sy = [&](double y) { return top + (hi - y) / (hi - lo) * ph; };

    std::ostringstream o;
    o.precision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape_xml(title) << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = lo + (hi - lo) * i / 4.0;
        const double x = t0 + (t1 - t0) * i / 4.0;
        o << "<text x=\"" << left - 6 << "\" y=\"" << sy(v) + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << v << "</text>\n";
        o << "<text x=\"" << sx(x) << "\" y=\"" << top + ph + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << x << "</text>\n";
    }
    if (lo < 0.0 && hi > 0.0) {
        o << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(0)
          << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">time [s]</text>\n";
    o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(y_label)
      << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        const std::size_t n = std::min(t.size(), series[s].values.size());
        for (std::size_t k = 0; k < n; ++k) {
            const double v = std::isfinite(series[s].values[k]) ? series[s].values[k] : 0.0;
            o << sx(t[k]) << ',' << sy(v) << (k + 1 < n ? " " : "");
        }
        o << "\"><title>" << escape_xml(series[s].label) << "</title></polyline>\n";
        const double ly = top + 14 + 16.0 * static_cast<double>(s);
        o << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << escape_xml(series[s].label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::vector<fs::path> export_result(const RunResult& result, const fs::path& dir, const ExportFormats& formats) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory", dir.string());

    std::vector<fs::path> written;
    const fs::path json_path = dir / "result.json";
    write_text(json_path, result_json(result).dump(2) + "\n");
    written.push_back(json_path);

    if (formats.csv) {
        const fs::path p = dir / "traces.csv";
        write_traces_csv(result.traces, p);
        written.push_back(p);
    }
    if (formats.svg) {
        const Traces& tr = result.traces;
        const auto ids = area_ids(tr);
        auto chart = [&](const std::string& file, const std::string& title, const std::string& unit,
                         const std::vector<ChartSeries>& series) {
            const fs::path p = dir / file;
            write_text(p, svg_line_chart(title, unit, tr.time(), series));
            written.push_back(p);
        };
        std::vector<ChartSeries> freq, est, tie, ibr;
        for (const auto& id : ids) {
            freq.push_back({id, tr.column(column::df_true(id))});
            est.push_back({id + " estimate", tr.column(column::d_hat(id))});
            est.push_back({id + " true", tr.column(column::load_true(id))});
            tie.push_back({id, tr.column(column::tie_meas(id))});
            const std::string prefix = id + ".";
            const std::string suffix = ".setpoint_MW";
            for (const auto& n : tr.names()) {
                if (n.starts_with(prefix) && n.ends_with(suffix) && n.size() > prefix.size() + suffix.size()) {
                    ibr.push_back({n.substr(0, n.size() - suffix.size()), tr.column(n)});
                }
            }
        }
        chart("frequency.svg", "Frequency deviation", "df [Hz]", freq);
        chart("estimate.svg", "Disturbance estimate vs truth", "load [MW]", est);
        chart("tie.svg", "Measured tie export", "P_tie [MW]", tie);
        chart("ibr.svg", "IBR set-points", "P [MW]", ibr);
    }
    return written;
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("invalid JSON (") + e.what() + ")", path.string());
    }
}

namespace {

void flatten(const nlohmann::json& j, const std::string& prefix, std::map<std::string, double>& out) {
    if (j.is_number()) {
        out[prefix] = j.get<double>();
    } else if (j.is_boolean()) {
        out[prefix] = j.get<bool>() ? 1.0 : 0.0;
    } else if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (const auto& e : j) {
            const std::string key = e.contains("area") ? e.at("area").get<std::string>() : std::string("?");
            flatten(e, prefix + "." + key, out);
        }
    }
}

}  // namespace

std::vector<MetricDelta> compare_runs(const fs::path& run_a, const fs::path& run_b) {
    const auto ja = read_json(run_a / "result.json");
    const auto jb = read_json(run_b / "result.json");
    if (!ja.contains("metrics") || !jb.contains("metrics")) {
        throw IoError("result.json without a metrics block", (ja.contains("metrics") ? run_b : run_a).string());
    }
    std::map<std::string, double> ma, mb;
    flatten(ja.at("metrics"), "", ma);
    flatten(jb.at("metrics"), "", mb);
    std::vector<MetricDelta> out;
    for (const auto& [key, a] : ma) {
        const auto it = mb.find(key);
        out.push_back({key, a, it == mb.end() ? NAN : it->second});
    }
    for (const auto& [key, b] : mb) {
        if (!ma.count(key)) out.push_back({key, NAN, b});
    }
    return out;
}

}  // namespace ddfc
