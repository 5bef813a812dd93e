#include "ddfc/signal.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ddfc/csv.hpp"

namespace ddfc {

namespace csv {

std::string format_lossless(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
        out.back().pop_back();
    }
    return out;
}

double parse_double(std::string_view text) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace csv

Signal::Signal(Matrix samples, double period_s) : samples_(std::move(samples)), period_s_(period_s) {
    if (!(period_s_ > 0.0) || !std::isfinite(period_s_)) {
        throw std::invalid_argument("Signal period must be positive, got " + std::to_string(period_s_));
    }
    if (samples_.cols() < 1) {
        throw std::invalid_argument("Signal needs at least one sample");
    }
}

Signal Signal::zeros(Index channels, Index length, double period_s) {
    return Signal(Matrix::Zero(channels, length), period_s);
}

Signal Signal::window(Index first, Index count) const {
    if (first < 0 || count < 1 || first + count > length()) {
        throw std::invalid_argument("Signal window [" + std::to_string(first) + ", " +
                                    std::to_string(first + count) + ") outside length " +
                                    std::to_string(length()));
    }
    return Signal(samples_.middleCols(first, count), period_s_);
}

Signal Signal::diff() const {
    if (length() < 2) {
        throw std::invalid_argument("Signal::diff needs at least two samples");
    }
    const Index n = length() - 1;
    Matrix out = samples_.rightCols(n) - samples_.leftCols(n);
    return Signal(std::move(out), period_s_);
}

TrajectoryDataset::TrajectoryDataset(Signal u_in, Signal d_in, Signal y_in, std::string label_in)
    : u(std::move(u_in)), d(std::move(d_in)), y(std::move(y_in)), label(std::move(label_in)) {
    if (u.length() != d.length() || u.length() != y.length()) {
        throw std::invalid_argument("TrajectoryDataset: u, d, y lengths differ (" + std::to_string(u.length()) +
                                    ", " + std::to_string(d.length()) + ", " + std::to_string(y.length()) + ")");
    }
    if (u.period_s() != d.period_s() || u.period_s() != y.period_s()) {
        throw std::invalid_argument("TrajectoryDataset: u, d, y periods differ");
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

void write_dataset(const TrajectoryDataset& data, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) {
        throw IoError("cannot write dataset", csv_path.string());
    }
    out << 't';
    for (Index i = 0; i < data.m(); ++i) out << ",u" << i + 1;
    for (Index i = 0; i < data.q(); ++i) out << ",d" << i + 1;
    for (Index i = 0; i < data.p(); ++i) out << ",y" << i + 1;
    out << '\n';
    for (Index k = 0; k < data.length(); ++k) {
        out << csv::format_fixed(static_cast<double>(k) * data.period_s(), 6);
        for (const Signal* s : {&data.u, &data.d, &data.y}) {
            for (Index i = 0; i < s->channels(); ++i) {
                out << ',' << csv::format_lossless(s->samples()(i, k));
            }
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing dataset", csv_path.string());
    }

    nlohmann::json meta = {
        {"period_s", data.period_s()}, {"label", data.label}, {"m", data.m()},
        {"q", data.q()},               {"p", data.p()},       {"samples", data.length()},
        {"units", "per-unit on system base"},
    };
    const auto side = sidecar_path(csv_path);
    std::ofstream js(side);
    if (!js) {
        throw IoError("cannot write dataset sidecar", side.string());
    }
    js << meta.dump(2) << '\n';
}

TrajectoryDataset read_dataset(const std::filesystem::path& csv_path) {
    const auto side = sidecar_path(csv_path);
    std::ifstream js(side);
    if (!js) {
        throw IoError("cannot open dataset sidecar", side.string());
    }
    nlohmann::json meta;
    try {
        js >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed dataset sidecar " + side.string() + ": " + e.what());
    }
    const double period = meta.at("period_s").get<double>();
    const Index m = meta.at("m").get<Index>();
    const Index q = meta.at("q").get<Index>();
    const Index p = meta.at("p").get<Index>();

    std::ifstream in(csv_path);
    if (!in) {
        throw IoError("cannot open dataset", csv_path.string());
    }
    std::string line;
    std::getline(in, line);
    const auto header = csv::split(line);
    if (static_cast<Index>(header.size()) != 1 + m + q + p || header.front() != "t") {
        throw ConfigError("dataset header does not match sidecar channel counts: " + csv_path.string());
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = csv::split(line);
        if (static_cast<Index>(cells.size()) != 1 + m + q + p) {
            throw ConfigError("dataset row has wrong column count: " + csv_path.string());
        }
        std::vector<double> row;
        row.reserve(cells.size() - 1);
        for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(csv::parse_double(cells[c]));
        rows.push_back(std::move(row));
    }
    const Index T = static_cast<Index>(rows.size());
    if (T < 1) {
        throw ConfigError("dataset has no samples: " + csv_path.string());
    }
    Matrix u(m, T), d(q, T), y(p, T);
    for (Index k = 0; k < T; ++k) {
        const auto& r = rows[static_cast<std::size_t>(k)];
        for (Index i = 0; i < m; ++i) u(i, k) = r[static_cast<std::size_t>(i)];
        for (Index i = 0; i < q; ++i) d(i, k) = r[static_cast<std::size_t>(m + i)];
        for (Index i = 0; i < p; ++i) y(i, k) = r[static_cast<std::size_t>(m + q + i)];
    }
    return TrajectoryDataset(Signal(std::move(u), period), Signal(std::move(d), period), Signal(std::move(y), period),
                             meta.value("label", std::string{}));
}

}  // namespace ddfc
